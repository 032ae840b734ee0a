"""Domain errors and warnings shared across the package.

Every error the library raises deliberately derives from :class:`MenError`,
so callers (and the CLI) can map failures to stable one-line messages by
exception type.
"""

from __future__ import annotations


class MenError(Exception):
    """Base class for all domain errors raised by this package."""


class MissingBinding(MenError):
    """A full assignment was required but some qubit is unbound."""


class InvalidUnitary(MenError):
    """A single-qubit matrix is not unitary within tolerance."""


class ZeroProbabilityOutcome(MenError):
    """Measurement outcome has (numerically) zero probability; no collapse."""


class InvalidPartition(MenError):
    """Qubit sets overlap, are empty where forbidden, or fall outside 1..n."""


class NotSeparable(MenError):
    """Factor extraction requested for an entangled split."""


class DegenerateState(MenError):
    """No amplitude exceeds the zero threshold; reference cannot be chosen."""


class ZeroReferenceAmplitude(MenError):
    """A reference amplitude in a potential-function denominator is ~0."""


class InconsistentGraph(MenError):
    """Potentials disagree with the declared graph (tolerance or graph bug)."""


class EnumerationBoundExceeded(MenError):
    """Exhaustive verification requested beyond its size guard."""


class NotAChain(MenError):
    """Chain-specialized inference called on a non-path graph."""


class NotAPrefix(MenError):
    """Prefix-marginal query bindings are not a contiguous prefix 1..m."""


class InvalidQuery(MenError):
    """Query bindings are out of range, overlapping, or malformed."""


class ZeroEvidenceProbability(MenError):
    """Conditioning event has probability below the underflow floor."""


class WrongArity(MenError):
    """Operation defined only for 3-qubit states was called with n != 3."""


class AllBasesRejected(MenError):
    """Every sampled basis had near-zero amplitudes; topology is undecided."""


class FileFormatError(MenError):
    """State or model file is malformed or violates its format contract."""


class ZeroAmplitudeWarning(UserWarning):
    """State has amplitudes at or below the zero threshold.

    Conditional-separability verdicts of "separable" are unreliable in this
    regime: a slice-wise rank test can pass even though the state is
    entangled, so graphs built from such states may not reflect all
    dependencies.
    """
