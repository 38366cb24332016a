"""Simulation layer: gNodeB and UE agents plus the mutation hook."""

from .gnb import GnbAgent, GnbContext, ResourceBinding, SetupOutcome, UeBinding
from .mutation import Mutation, MutationAction, MutationSet, MutationUnmatched
from .trace import IN, OUT, FlowTrace, FsmCheck, TraceEntry
from .ue import (
    MisorderedOutcome,
    PreconditionError,
    RegistrationOutcome,
    SessionOutcome,
    SessionState,
    UeAgent,
    UeContext,
    UserPlaneOutcome,
)

__all__ = [name for name in dir() if not name.startswith("_")]
