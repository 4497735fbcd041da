"""Block-transitive 2-(v,5,lambda) design engine."""
