"""
MCP Server
"""


from mcp.server.fastmcp import FastMCP

from src.utils import settings

mcp_server = FastMCP(
    name=settings.APP_NAME,
)

import src.mcp.tools.experiment_tools  # noqa: E402,F401
