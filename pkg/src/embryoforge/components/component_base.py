# All flow components inherit from this class

import queue
import threading
import time
import traceback
from abc import abstractmethod

from ..common.log import log
from ..common.message import Message
from ..common.params import coerce_parameter

DEFAULT_QUEUE_TIMEOUT_MS = 200
DEFAULT_QUEUE_MAX_DEPTH = 5


def job_fields(message):
    """(job index, source path) of a preprocessing message, where present"""
    payload = message.get_payload() if message is not None else None
    if not isinstance(payload, dict):
        return None, None
    entry = payload.get("entry")
    path = entry.get("path") if isinstance(entry, dict) else getattr(entry, "path", None)
    return payload.get("index"), path


class ComponentBase:
    """One worker of a flow stage.

    Every instance runs in its own thread and takes jobs from an input queue
    shared with the other instances of its stage. ``invoke`` turns the
    selected input into a result that is handed to the next stage, or to the
    flow's result queue after the last stage. A job whose ``invoke`` raises
    becomes an error record on the error queue and goes no further."""

    def __init__(self, module_info, **kwargs):
        self.module_info = module_info
        self.config = kwargs.pop("config", {})
        self.index = kwargs.pop("index", None)
        self.flow_name = kwargs.pop("flow_name", None)
        self.stop_signal = kwargs.pop("stop_signal", None)
        self.sibling_component = kwargs.pop("sibling_component", None)
        self.component_index = kwargs.pop("component_index", None)
        self.error_queue = kwargs.pop("error_queue", None)
        self.result_queue = kwargs.pop("result_queue", None)
        self.instance_name = kwargs.pop("instance_name", None)
        self.storage_manager = kwargs.pop("storage_manager", None)

        self.component_config = dict(self.config.get("component_config") or {})
        self.name = self.config.get("component_name", "<unnamed>")
        self.log_identifier = f"[{self.instance_name}.{self.flow_name}.{self.name}.{self.component_index}] "

        self.next_component = None
        self.thread = None
        self.queue_timeout_ms = DEFAULT_QUEUE_TIMEOUT_MS
        self.jobs_done = 0
        self.jobs_failed = 0
        self.busy_seconds = 0.0

        log.debug("%sCreating component with config %s", self.log_identifier, self.component_config)
        self.validate_config()
        self.setup_communications()

    def create_thread_and_run(self):
        self.thread = threading.Thread(target=self.run, name=f"{self.name}-{self.component_index}", daemon=True)
        self.thread.start()
        return self.thread

    def run(self):
        while not self.stop_signal.is_set():
            message = self.get_next_message()
            if message is None:
                continue
            started = time.perf_counter()
            try:
                self.process_message(message)
                self.jobs_done += 1
            except Exception as e:  # pylint: disable=broad-except
                self.jobs_failed += 1
                self.report_failure(message, e)
            finally:
                self.busy_seconds += time.perf_counter() - started
        self.stop_component()

    def report_failure(self, message, error):
        job, source = job_fields(message)
        log.warning("%sJob %s (%s) failed: %s", self.log_identifier, job, source, error)
        log.debug("%s%s", self.log_identifier, traceback.format_exc())
        if self.error_queue is None:
            return
        record = {
            "error": {"text": str(error), "exception": type(error).__name__},
            "job": job,
            "source": source,
            "location": {
                "instance": self.instance_name,
                "flow": self.flow_name,
                "component": self.name,
                "component_index": self.component_index,
            },
            "message": {"payload": message.get_payload(), "user_data": message.get_user_data()},
        }
        self.error_queue.put(Message(payload=record))

    def get_next_message(self):
        # Wait for a job, checking the stop signal between waits
        while not self.stop_signal.is_set():
            try:
                message = self.input_queue.get(timeout=self.queue_timeout_ms / 1000)
            except queue.Empty:
                continue
            log.debug("%sReceived job %s", self.log_identifier, job_fields(message)[0])
            return message
        return None

    def process_message(self, message):
        result = self.invoke(message, self.get_input_data(message))
        # A None result ends the job here
        if result is not None:
            message.set_previous(result)
            self.send_message(message)

    def get_input_data(self, message):
        component_input = self.config.get("component_input") or {}
        return message.get_data(component_input.get("source_expression", "previous"))

    @abstractmethod
    def invoke(self, message, data):
        """Process one job and return the data for the next stage"""

    def send_message(self, message):
        if self.next_component is None:
            if self.result_queue is not None:
                self.result_queue.put(message)
            return
        self.next_component.enqueue(message)

    def enqueue(self, message):
        # Bounded queue: block until there is room or the flow stops
        while not self.stop_signal.is_set():
            try:
                self.input_queue.put(message, timeout=1)
                return
            except queue.Full:
                pass

    def get_input_queue(self):
        return self.input_queue

    def get_config(self, key=None, default=None):
        val = self.component_config.get(key, None)
        if val is None:
            val = self.config.get(key, default)
        return val

    def set_next_component(self, next_component):
        self.next_component = next_component

    def get_next_component(self):
        return self.next_component

    def setup_communications(self):
        self.queue_max_depth = self.config.get("component_queue_max_depth", DEFAULT_QUEUE_MAX_DEPTH)
        if self.sibling_component:
            # All instances of a stage share one input queue
            self.input_queue = self.sibling_component.get_input_queue()
        else:
            self.input_queue = queue.Queue(maxsize=self.queue_max_depth)

    def validate_config(self):
        """Fill in defaults and convert every declared parameter to its type"""
        for param in self.module_info.get("config_parameters", []):
            name = param.get("name", None)
            if name is None:
                raise ValueError(
                    f"config_parameters schema for module {self.config.get('component_module')} "
                    f"does not have a name: {param}"
                )
            if name not in self.component_config:
                if param.get("required", False):
                    raise ValueError(f"Config parameter {name} is required but not present in component {self.name}")
                if param.get("default") is None:
                    continue
                self.component_config[name] = param["default"]
            self.component_config[name] = coerce_parameter(param, self.component_config[name])

    def stop_component(self):
        log.debug(
            "%sStopped after %d jobs (%d failed, %.2fs busy)",
            self.log_identifier,
            self.jobs_done,
            self.jobs_failed,
            self.busy_seconds,
        )
