"""Exception types shared across the litmini package."""

from __future__ import annotations


class LitminiError(Exception):
    """Base class for all litmini errors."""


# -- corpus / ingest ---------------------------------------------------------

class MalformedFilename(LitminiError):
    """Document filename does not follow the abbrev-year-title convention."""


class EmptyDocument(LitminiError):
    """No body text remained after extraction."""


class EmptyCorpus(LitminiError):
    """The corpus holds no sentences at all."""


class UnknownSid(LitminiError):
    """Sentence id not present in the corpus."""


# -- embedding ---------------------------------------------------------------

class DuplicateModel(LitminiError):
    """Model abbreviation already registered."""


class UnknownModel(LitminiError):
    """Model abbreviation not found in the registry."""


class DimensionMismatch(LitminiError):
    """Vector width differs from the registered model dimension."""


class ZeroVector(LitminiError):
    """Cannot normalize a vector with zero norm."""


# -- index / search ----------------------------------------------------------

class StoreFormatError(LitminiError):
    """Vector store file is corrupt; message carries the failing offset."""


class EmptyQuery(LitminiError):
    """Keyword query has no groups or an empty group."""


class NoCandidates(LitminiError):
    """Filters eliminated every sentence from a non-empty corpus."""


class NoCaptionIndex(LitminiError):
    """No caption store is available for caption search."""


class EmptyScores(LitminiError):
    """Variance of an empty score sequence is undefined."""


class DegenerateMatrix(LitminiError):
    """Influence analysis needs at least two models and one sentence."""


class BadEdges(LitminiError):
    """Bucket edges must be strictly descending with at least two entries."""


# -- clustering --------------------------------------------------------------

class EmptyInput(LitminiError):
    """Clustering requires at least one vector."""


class InputTooLarge(LitminiError):
    """Input exceeds the documented ceiling for the dense similarity matrix."""


# -- sentiment / summarize ---------------------------------------------------

class UnknownLabel(LitminiError):
    """Classifier returned a label outside the fixed registry."""


class EmptySelection(LitminiError):
    """No sentences were selected for prompting."""


# -- providers ---------------------------------------------------------------

class ProviderUnavailable(LitminiError):
    """An external provider could not be reached or kept failing."""
