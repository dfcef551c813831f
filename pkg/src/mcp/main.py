"""
MCP Server
"""

import uvicorn

from src.mcp.mount import app
from src.utils import settings


def main():
    uvicorn.run(
        "src.mcp.main:app",
        host=settings.MCP_HOST,
        port=settings.MCP_PORT,
        reload=False
    )


if __name__ == "__main__":
    main()
