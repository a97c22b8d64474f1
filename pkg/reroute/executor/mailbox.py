from __future__ import annotations

__all__ = ("Mailbox",)


class Mailbox[T]:
    """Holds the latest value published by one loop for the others.

    Readers never block and only ever see whole values. ``version`` counts publications so a
    reader can tell whether something new arrived.
    """

    __slots__ = ("_value", "_version", "name")

    def __init__(self, name: str, initial: T | None = None) -> None:
        self.name: str = name
        self._value: T | None = initial
        self._version: int = 0 if initial is None else 1

    def __repr__(self) -> str:
        return f"<Mailbox name={self.name!r} version={self._version}>"

    @property
    def version(self) -> int:
        """int: The number of values published so far."""
        return self._version

    def put(self, value: T) -> None:
        """Replaces the held value."""
        self._value = value
        self._version += 1

    def get(self) -> T | None:
        """Returns the latest value, or None if nothing was published."""
        return self._value

    def take_if_newer(self, version: int) -> tuple[T | None, int]:
        """Returns the latest value and its version when it is newer than ``version``, else ``(None, version)``."""
        if self._version > version:
            return self._value, self._version
        return None, version
