"""
General settings for the application.
"""
import os
from pydantic_settings import BaseSettings

class Settings(BaseSettings):
    APP_NAME: str = os.getenv("APP_NAME", "GhostLab")
    DESCRIPTION: str = os.getenv("DESCRIPTION", "Dynamic ghost imaging laboratory")

    # Experiment defaults
    OUTPUT_DIR: str = os.getenv("OUTPUT_DIR", "results")
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "7"))

    # Runtime
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    TORCH_THREADS: int = int(os.getenv("TORCH_THREADS", "1"))

    # MCP server
    MCP_HOST: str = os.getenv("MCP_HOST", "localhost")
    MCP_PORT: int = int(os.getenv("MCP_PORT", "5555"))

    class Config:
        case_sensitive = True
        env_file = ".env"
        extra = "allow"
