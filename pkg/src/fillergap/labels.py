"""Construction labels: three families, subtyped by extraction site."""

from __future__ import annotations

from enum import Enum


class Label(str, Enum):
    SMQ = "SMQ"
    OMQ = "OMQ"
    AMQ = "AMQ"
    PMQ = "PMQ"
    PlainMQ = "PlainMQ"
    CC_SMQ = "CC_SMQ"
    CC_OMQ = "CC_OMQ"
    CC_AMQ = "CC_AMQ"
    SEQ = "SEQ"
    OEQ = "OEQ"
    AEQ = "AEQ"
    PEQ = "PEQ"
    SRC = "SRC"
    ORC = "ORC"
    ARC = "ARC"
    PRC = "PRC"
    SRC_reduced = "SRC_reduced"
    ORC_reduced = "ORC_reduced"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


LABEL_ORDER = {label: i for i, label in enumerate(Label)}

MATRIX_Q = "matrixQ"
EMBEDDED_Q = "embeddedQ"
RC = "RC"

FAMILIES: dict[str, frozenset[Label]] = {
    MATRIX_Q: frozenset({Label.SMQ, Label.OMQ, Label.AMQ, Label.PMQ, Label.PlainMQ,
                         Label.CC_SMQ, Label.CC_OMQ, Label.CC_AMQ}),
    EMBEDDED_Q: frozenset({Label.SEQ, Label.OEQ, Label.AEQ, Label.PEQ}),
    RC: frozenset({Label.SRC, Label.ORC, Label.ARC, Label.PRC,
                   Label.SRC_reduced, Label.ORC_reduced}),
}

# Subject/object label pairs per family; CC_ variants count on the matrix side.
SUBJECT_LABELS: dict[str, frozenset[Label]] = {
    MATRIX_Q: frozenset({Label.SMQ, Label.CC_SMQ}),
    EMBEDDED_Q: frozenset({Label.SEQ}),
    RC: frozenset({Label.SRC}),
}
OBJECT_LABELS: dict[str, frozenset[Label]] = {
    MATRIX_Q: frozenset({Label.OMQ, Label.CC_OMQ}),
    EMBEDDED_Q: frozenset({Label.OEQ}),
    RC: frozenset({Label.ORC}),
}


def parse_label(name: str) -> Label:
    try:
        return Label(name)
    except ValueError:
        raise ValueError(f"unknown label {name!r}") from None
