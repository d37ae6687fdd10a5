"""A flow: a chain of component stages joined by bounded queues.

A stage holds ``num_instances`` copies of one component that share a single
input queue. Jobs enter through the first stage's queue; whatever leaves the
last stage goes to the flow's result queue."""

from ..common.log import log
from ..common.utils import import_module


def load_component_module(component_module):
    """(info, class) of a component module"""
    imported_module = import_module(component_module)
    module_info = getattr(imported_module, "info", None)
    if module_info is None:
        raise ValueError(
            f"Component module '{component_module}' does not have an 'info' attribute. "
            "It probably isn't a valid component."
        )
    return module_info, getattr(imported_module, module_info["class_name"])


class Flow:
    def __init__(
        self,
        flow_config,
        flow_index,
        stop_signal,
        error_queue=None,
        result_queue=None,
        instance_name=None,
        storage_manager=None,
    ):
        self.flow_config = flow_config
        self.flow_index = flow_index
        self.name = flow_config.get("name")
        self.stop_signal = stop_signal
        self.error_queue = error_queue
        self.result_queue = result_queue
        self.instance_name = instance_name
        self.storage_manager = storage_manager
        self.threads = []

        self.stages = [
            self.create_stage(component, index)
            for index, component in enumerate(self.flow_config.get("components", []))
        ]
        for stage, next_stage in zip(self.stages, self.stages[1:]):
            for component in stage:
                component.set_next_component(next_stage[0])
        for stage in self.stages:
            self.threads.extend(component.create_thread_and_run() for component in stage)
        self.flow_input_queue = self.stages[0][0].get_input_queue()

        log.debug(
            "Flow %s started: %s",
            self.name,
            " -> ".join(f"{stage[0].name} x{len(stage)}" for stage in self.stages),
        )

    def create_stage(self, component, index):
        """All instances of one component, sharing the first instance's queue"""
        _, component_class = load_component_module(component.get("component_module", ""))
        num_instances = max(1, int(component.get("num_instances", 1)))
        stage = []
        for component_index in range(num_instances):
            stage.append(
                component_class(
                    config=component,
                    index=index,
                    flow_name=self.name,
                    stop_signal=self.stop_signal,
                    sibling_component=stage[0] if stage else None,
                    component_index=component_index,
                    error_queue=self.error_queue,
                    result_queue=self.result_queue,
                    instance_name=self.instance_name,
                    storage_manager=self.storage_manager,
                )
            )
        return stage

    def get_flow_input_queue(self):
        return self.flow_input_queue

    def jobs_done(self):
        """Jobs each stage finished, keyed by component name"""
        return {stage[0].name: sum(component.jobs_done for component in stage) for stage in self.stages}

    def wait_for_threads(self, timeout=None):
        for thread in self.threads:
            thread.join(timeout)
