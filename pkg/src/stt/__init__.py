"""Set-theoretic types with semantic subtyping."""
