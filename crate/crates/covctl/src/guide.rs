//! Book chapters compiled as doc-tests (placeholder during bring-up).
