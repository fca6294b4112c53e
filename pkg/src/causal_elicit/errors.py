"""Exception and warning types raised across the pipeline."""


class CausalElicitError(Exception):
    """Base class for all pipeline errors."""


# gateway
class AuthError(CausalElicitError):
    """API key missing from the environment or rejected by the provider."""


class TransportError(CausalElicitError):
    """Provider request failed and retries are exhausted (or not retryable)."""


class RetryableError(TransportError):
    """Transient failure (HTTP 429/5xx, timeout); the gateway retries these."""


class EmptyResponse(CausalElicitError):
    """Provider answered but returned no text."""


class DimMismatch(CausalElicitError):
    """Embedding vectors of different lengths within one run."""


# corpus / extraction
class CorruptCorpus(CausalElicitError):
    def __init__(self, line, message="malformed record"):
        self.line = line
        super().__init__(f"line {line}: {message}")


# canonicalization
class NoEvents(CausalElicitError):
    """Every document extracted to an empty event list."""


class BadK(CausalElicitError):
    pass


class EmptyCluster(CausalElicitError):
    pass


# incidence
class UnknownMention(CausalElicitError):
    pass


class UnmappedColumn(CausalElicitError):
    pass


class DegenerateMatrix(CausalElicitError):
    """Fewer than two usable variables for causal discovery."""


# discovery
class BadVars(CausalElicitError):
    pass


class ConstantColumn(CausalElicitError):
    pass


class DegenerateEmbedding(UserWarning):
    """A zero-norm embedding was left unnormalized."""


class IcaNonconvergence(UserWarning):
    """FastICA hit its iteration cap; the returned estimate is best effort."""
