"""Collection of functions to be used in test files"""

import queue
import sys
import os
import yaml
import numpy as np

sys.path.insert(0, os.path.abspath("src"))

from embryoforge.embryoforge import (  # pylint: disable=wrong-import-position
    EmbryoForge,
)
from embryoforge.common.log import (  # pylint: disable=wrong-import-position
    log,
)
from embryoforge.models.layers import (  # pylint: disable=wrong-import-position
    NetworkConfig,
)

# Keep test runs from writing a log file into the working directory
QUIET_LOG = {"stdout_log_level": "WARNING", "log_file": None}


class TestOutputComponent:
    """A simple output component that receives the output from the previous component.
    It is used to test the output of a flow."""

    def __init__(self, queue_timeout=None, queue_size=0):
        self.queue = queue.Queue(queue_size)
        self.queue_timeout = queue_timeout
        self.stop = False

    def enqueue(self, message):
        do_loop = True
        while do_loop and not self.stop:
            try:
                self.queue.put(message, timeout=1)
                do_loop = False
            except queue.Full:
                pass

    def stop_output(self):
        self.stop = True

    def get_output(self):
        try:
            message = self.queue.get(timeout=self.queue_timeout)
            log.debug("Output test component received message: %s", message)
        except queue.Empty:
            message = None
        return message


class TestInputComponent:
    """A simple input component that allows for the input of a message.
    It is used to test the input of a flow."""

    def __init__(self, next_component_queue):
        self.next_component_queue = next_component_queue

    def enqueue(self, message):
        log.debug("Input test component sending message: %s", message)
        self.next_component_queue.put(message)


def create_app(config_yaml, error_queue=None):
    """Create an application from a config and start its flows"""
    config = yaml.safe_load(config_yaml) or {}
    config.setdefault("log", dict(QUIET_LOG))
    app = EmbryoForge(config, error_queue=error_queue)
    app.run()
    return app


def create_test_flows(config_yaml, queue_timeout=None, error_queue=None, queue_size=0):
    app = create_app(config_yaml, error_queue=error_queue)

    flows = app.get_flows()

    # For each of the flows, add the input and output components
    flow_info = []
    for flow in flows:
        input_component = TestInputComponent(flow.stages[0][0].get_input_queue())
        output_component = TestOutputComponent(queue_timeout=queue_timeout, queue_size=queue_size)
        for component in flow.stages[-1]:
            component.set_next_component(output_component)
        flow_info.append(
            {
                "flow": flow,
                "input_component": input_component,
                "output_component": output_component,
            }
        )

    return app, flow_info


def stop_test_flows(app):
    for flow in app.get_flows():
        last_component = flow.stages[-1][-1]
        next_component = last_component.get_next_component()
        if isinstance(next_component, TestOutputComponent):
            next_component.stop_output()


def send_message_to_flow(flow_info, message):
    input_component = flow_info["input_component"]
    input_component.enqueue(message)


def get_message_from_flow(flow_info):
    output_component = flow_info["output_component"]
    return output_component.get_output()


def dispose_app(app):
    stop_test_flows(app)
    app.stop()


def create_and_run_component(config_yaml, message, queue_timeout=None, error_queue=None, no_output=False):
    app, flow_info = create_test_flows(config_yaml, queue_timeout=queue_timeout, error_queue=error_queue)
    try:
        send_message_to_flow(flow_info[0], message)
        output_message = None
        if not no_output:
            output_message = get_message_from_flow(flow_info[0])
    except Exception as e:
        dispose_app(app)
        raise e
    dispose_app(app)
    return output_message


# -- numerical fixtures -------------------------------------------------------------


def reference_conv2d(x, k, stride=1, pad=0):
    """Nested-loop convolution (cross-correlation) used as an oracle"""
    n, c_in, h, w = x.shape
    c_out, _, kh, kw = k.shape
    padded = np.zeros((n, c_in, h + 2 * pad, w + 2 * pad), dtype=np.float64)
    padded[:, :, pad : pad + h, pad : pad + w] = x
    out_h = (h + 2 * pad - kh) // stride + 1
    out_w = (w + 2 * pad - kw) // stride + 1
    out = np.zeros((n, c_out, out_h, out_w))
    for b in range(n):
        for o in range(c_out):
            for i in range(out_h):
                for j in range(out_w):
                    total = 0.0
                    for c in range(c_in):
                        for u in range(kh):
                            for v in range(kw):
                                total += padded[b, c, i * stride + u, j * stride + v] * k[o, c, u, v]
                    out[b, o, i, j] = total
    return out


def reference_median_3d(volume, radius=1):
    """Sort-the-window median with clamped coordinates"""
    depth, height, width = volume.shape
    out = np.empty_like(volume)
    for s in range(depth):
        for y in range(height):
            for x in range(width):
                window = []
                for ds in range(-radius, radius + 1):
                    for dy in range(-radius, radius + 1):
                        for dx in range(-radius, radius + 1):
                            window.append(
                                volume[
                                    min(max(s + ds, 0), depth - 1),
                                    min(max(y + dy, 0), height - 1),
                                    min(max(x + dx, 0), width - 1),
                                ]
                            )
                out[s, y, x] = sorted(window)[len(window) // 2]
    return out


def small_net_config(input_size=16, **overrides):
    """A narrow network configuration that trains in well under a second per step"""
    values = {"input_size": input_size, "base_filters": 4, "hidden_units": 16}
    values.update(overrides)
    return NetworkConfig(**values)
