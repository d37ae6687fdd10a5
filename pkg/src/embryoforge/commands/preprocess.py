"""Median filter, brightness adjustment and patch extraction over a raw corpus.

The stages run as a threaded flow; the median filter and the patch stages
get one worker per thread. A stack that fails is reported and skipped, the
others are still written."""

import os
import queue

from ..common.errors import InputError
from ..common.log import log
from ..common.message import Message
from ..common.utils import ensure_directory, parse_slice_range, resolve_thread_count
from ..dataio.manifest import read_manifest, write_manifest
from .command_base import CommandBase
from .parameters import OUT, SEED

FLOW_NAME = "preprocess"
RESULT_POLL_SECONDS = 0.1

info = {
    "class_name": "PreprocessCommand",
    "command": "preprocess",
    "section": "preprocess",
    "description": "Turn raw stacks into training patches and a patch manifest",
    "config_parameters": [
        {"name": "input", "type": "path", "required": True, "description": "Directory of the raw corpus"},
        {
            "name": "manifest",
            "type": "path",
            "description": "Raw stack manifest (default: <input>/manifest.jsonl)",
        },
        OUT,
        {"name": "patch", "type": "int", "default": 128, "description": "Patch side in pixels"},
        {"name": "slices", "type": "string", "default": "9:13", "description": "Inclusive slice range lo:hi"},
        {"name": "per_slice", "type": "int", "default": 1, "description": "Patches per slice"},
        SEED,
        {"name": "radius", "type": "int", "default": 1, "description": "Median filter radius"},
        {"name": "p_low", "type": "float", "default": 1.0, "description": "Lower brightness percentile"},
        {"name": "p_high", "type": "float", "default": 99.0, "description": "Upper brightness percentile"},
        {
            "name": "threads",
            "type": "int",
            "description": "Worker threads (default: CPU count, capped by EMBRYOFORGE_THREADS)",
        },
    ],
}


def preprocess_flow(input_dir, out_dir, cfg, workers):
    """Flow definition of the preprocessing pipeline"""
    return {
        "name": FLOW_NAME,
        "components": [
            {
                "component_name": "stack_reader",
                "component_module": "stack_reader",
                "component_config": {"input_dir": input_dir},
                "component_input": {"source_expression": "input.payload"},
            },
            {
                "component_name": "median_filter",
                "component_module": "median_filter",
                "num_instances": workers,
                "component_config": {"radius": cfg["radius"]},
            },
            {
                "component_name": "brightness_adjust",
                "component_module": "brightness_adjust",
                "num_instances": workers,
                "component_config": {"p_low": cfg["p_low"], "p_high": cfg["p_high"]},
            },
            {
                "component_name": "patch_extractor",
                "component_module": "patch_extractor",
                "num_instances": workers,
                "component_config": {
                    "patch": cfg["patch"],
                    "slices": cfg["slices"],
                    "per_slice": cfg["per_slice"],
                    "seed": cfg["seed"],
                },
            },
            {
                "component_name": "patch_writer",
                "component_module": "patch_writer",
                "num_instances": workers,
                "component_config": {"out_dir": out_dir, "seed": cfg["seed"]},
            },
        ],
    }


class PreprocessCommand(CommandBase):
    def __init__(self, **kwargs):
        super().__init__(info, **kwargs)
        self.failures = []

    def run(self):
        input_dir = self.get_config("input")
        out_dir = self.get_config("out")
        manifest_path = self.get_config("manifest") or os.path.join(input_dir, "manifest.jsonl")
        self.set_config("manifest", manifest_path)
        parse_slice_range(self.get_config("slices"))
        if self.get_config("patch") < 1 or self.get_config("per_slice") < 0:
            raise ValueError("patch must be >= 1 and per_slice >= 0")

        jobs = [entry for entry in read_manifest(manifest_path, check_files=False) if entry.role == "raw_stack"]
        if not jobs:
            raise InputError(f"Manifest {manifest_path} lists no raw stacks")
        ensure_directory(out_dir)
        workers = resolve_thread_count(self.get_config("threads"))
        log.info(
            "%sPreprocessing %d stacks from %s with %d workers",
            self.log_identifier,
            len(jobs),
            manifest_path,
            workers,
        )

        results = self.run_flow(jobs, os.path.dirname(os.path.abspath(manifest_path)), out_dir, workers)
        entries = [entry for index in sorted(results) for entry in results[index]]
        write_manifest(os.path.join(out_dir, "manifest.jsonl"), entries)
        self.write_resolved_config(out_dir)

        log.info("%sWrote %d patches to %s", self.log_identifier, len(entries), out_dir)
        if self.failures:
            self.failures.sort()
            log.error("%s%d of %d stacks failed:", self.log_identifier, len(self.failures), len(jobs))
            for path, text in self.failures:
                log.error("%s  %s: %s", self.log_identifier, path, text)
            return 1
        return 0

    def run_flow(self, jobs, input_dir, out_dir, workers):
        """Push every job through the flow; returns {job index: patch entries}"""
        flow = self.app.add_flow(preprocess_flow(input_dir, out_dir, self.command_config, workers))
        for index, entry in enumerate(jobs):
            self.app.send_message_to_flow(FLOW_NAME, Message(payload={"index": index, "entry": entry.to_dict()}))

        results = {}
        pending = len(jobs)
        try:
            while pending:
                try:
                    message = self.app.result_queue.get(timeout=RESULT_POLL_SECONDS)
                    result = message.get_previous()
                    results[result["index"]] = result["entries"]
                    pending -= 1
                except queue.Empty:
                    pass
                while not self.app.error_queue.empty():
                    error = self.app.error_queue.get().get_payload()
                    self.failures.append((error.get("source") or "<unknown>", error["error"]["text"]))
                    pending -= 1
            log.debug("%sJobs finished per stage: %s", self.log_identifier, flow.jobs_done())
        finally:
            self.app.stop()
        return results
