class EngineError(Exception):
    """Any engine failure. `code` names the error kind (for example
    "CallParseError" or "GroupTooSmall"); `offset` is the byte offset into a
    call string for grammar errors, else None."""

    def __init__(self, code, message):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.offset = None
