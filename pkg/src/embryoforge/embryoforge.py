"""Application object: logging, storage and the threaded flows of one run"""

import queue
import threading

from .common.log import log, setup_log
from .flow.flow import Flow
from .storage.storage_manager import StorageManager

DEFAULT_LOG_FILE = "embryoforge.log"


class EmbryoForge:
    """Hosts the flows of a run.

    Messages that leave the last component of a flow land on ``result_queue``;
    component failures land on ``error_queue`` as error records."""

    def __init__(self, config, error_queue=None, result_queue=None):
        self.config = config or {}
        self.flows = []
        self.flow_input_queues = {}
        self.stop_signal = threading.Event()
        self.error_queue = error_queue if error_queue else queue.Queue()
        self.result_queue = result_queue if result_queue else queue.Queue()
        self.setup_logging()
        self.validate_config()
        self.instance_name = self.config.get("instance_name", "embryoforge")
        self.storage_manager = StorageManager(self.config.get("storage", []))

    def run(self):
        log.debug("Starting embryoforge flows")
        self.create_flows()

    def create_flows(self):
        """Loop through the flows and create them"""
        for flow in self.config.get("flows", []):
            self.add_flow(flow)

    def create_flow(self, flow: dict, index: int):
        return Flow(
            flow_config=flow,
            flow_index=index,
            stop_signal=self.stop_signal,
            error_queue=self.error_queue,
            result_queue=self.result_queue,
            instance_name=self.instance_name,
            storage_manager=self.storage_manager,
        )

    def send_message_to_flow(self, flow_name, message):
        flow_input_queue = self.flow_input_queues.get(flow_name)
        if flow_input_queue is None:
            raise ValueError(f"Can't send message to flow {flow_name}. Not found")
        flow_input_queue.put(message)

    def wait_for_flows(self):
        """Wait for the flows to finish"""
        while True:
            try:
                for flow in self.flows:
                    flow.wait_for_threads()
                break
            except KeyboardInterrupt:
                log.info("Received keyboard interrupt - stopping")
                self.stop_signal.set()

    def stop(self):
        log.debug("Stopping embryoforge flows")
        self.stop_signal.set()
        self.wait_for_flows()

    def setup_logging(self):
        log_config = self.config.get("log", {})
        stdout_log_level = log_config.get("stdout_log_level", "INFO")
        file_log_level = log_config.get("file_log_level", "DEBUG")
        log_file = log_config.get("log_file", DEFAULT_LOG_FILE)
        setup_log(log_file, stdout_log_level, file_log_level)

    def add_flow(self, flow: dict):
        """Validate, create and start one more flow"""
        index = len(self.flows)
        self.validate_flow(flow, index)
        log.debug("Creating flow %s", flow.get("name"))
        flow_instance = self.create_flow(flow, index)
        self.flow_input_queues[flow.get("name")] = flow_instance.get_flow_input_queue()
        self.flows.append(flow_instance)
        return flow_instance

    def validate_config(self):
        for index, flow in enumerate(self.config.get("flows", [])):
            self.validate_flow(flow, index)

    def validate_flow(self, flow, index):
        if not flow.get("name"):
            raise ValueError(f"Flow name not provided in flow {index}")

        if flow.get("name") in self.flow_input_queues:
            raise ValueError(f"Flow name {flow.get('name')} is used twice")

        if not flow.get("components"):
            raise ValueError(f"Flow components list not provided in flow {index}")

        if not isinstance(flow.get("components"), list):
            raise ValueError(f"Flow components is not a list in flow {index}")

        for component_index, component in enumerate(flow.get("components", [])):
            if not component.get("component_name"):
                raise ValueError(
                    f"component_name not provided in flow {index}, component {component_index}"
                )

            if not component.get("component_module"):
                raise ValueError(
                    f"component_module not provided in flow {index}, "
                    f"component {component_index}"
                )

            num_instances = component.get("num_instances", 1)
            if not isinstance(num_instances, int) or num_instances < 1:
                raise ValueError(
                    f"num_instances must be a positive integer in flow {index}, "
                    f"component {component_index}; got {num_instances!r}"
                )

    def get_flows(self):
        return self.flows
