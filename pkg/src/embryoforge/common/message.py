# Message class. This is the type of object that is passed between components in the flow.


class Message:
    def __init__(self, payload=None, user_data=None):
        self.payload = payload
        self.user_data = user_data or {}
        self.previous = None

    # This will return the specified data from the message. The expression has the format:
    #   input.payload          - The payload the message was created with
    #   previous               - The result from the previous component
    #   user_data.<name>       - Data that a previous component stored on the message
    # Names can be chained with dots to reach into nested dictionaries, for example
    #   input.payload.entry.path
    def get_data(self, expression):
        if expression.startswith("input.payload"):
            data = self.payload
            rest = expression[len("input.payload") :]
        elif expression.startswith("previous"):
            data = self.previous
            rest = expression[len("previous") :]
        elif expression.startswith("user_data."):
            data = self.user_data
            rest = expression[len("user_data") :]
        else:
            raise ValueError(f"Unknown data expression: {expression}")

        for name in [part for part in rest.split(".") if part]:
            if isinstance(data, dict):
                data = data.get(name)
            elif isinstance(data, list) and name.isdigit():
                data = data[int(name)]
            else:
                data = getattr(data, name, None)
            if data is None:
                return None
        return data

    def set_user_data(self, name, value):
        self.user_data[name] = value

    def get_payload(self):
        return self.payload

    def get_previous(self):
        return self.previous

    def set_previous(self, previous):
        self.previous = previous

    def get_user_data(self):
        return self.user_data

    def __str__(self):
        return f"Message(payload={self.payload!r}, previous={type(self.previous).__name__})"
