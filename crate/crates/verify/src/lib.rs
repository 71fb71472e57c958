//! Holds the `acceptance` integration test; the library itself is empty.
