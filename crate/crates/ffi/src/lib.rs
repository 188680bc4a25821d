//! C ABI surface. Fleshed out alongside the header generation.
