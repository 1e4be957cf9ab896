"""Data models: numeric image containers and pydantic parameter schemas."""
