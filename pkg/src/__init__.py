"""kcmf - knowledge-enhanced schema and entity matching with LLMs."""
