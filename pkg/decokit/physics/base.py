"""
Base model shared by the physics value types
"""

from pydantic import BaseModel, ConfigDict


class PhysicsModel(BaseModel):
    """Immutable value type; invariants are checked at construction"""

    model_config = ConfigDict(frozen=True, extra="forbid")


class ArrayModel(BaseModel):
    """Immutable container for numpy-backed data"""

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)
