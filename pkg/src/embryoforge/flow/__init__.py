from .flow import Flow
