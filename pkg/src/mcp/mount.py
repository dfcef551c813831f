"""
Starlette app serving the GhostLab MCP tools over SSE, plus a health probe.
"""

from mcp.server.sse import SseServerTransport
from starlette.applications import Starlette
from starlette.middleware import Middleware
from starlette.middleware.cors import CORSMiddleware
from starlette.responses import JSONResponse
from starlette.routing import Mount, Route

from src.mcp.server import mcp_server
from src.utils import settings

sse = SseServerTransport("/messages/")


async def handle_sse(request):
    async with sse.connect_sse(request.scope, request.receive, request._send) as (read_stream, write_stream):
        server = mcp_server._mcp_server
        await server.run(read_stream, write_stream, server.create_initialization_options())


async def health(request):
    tools = await mcp_server.list_tools()
    return JSONResponse({"app": settings.APP_NAME, "tools": sorted(t.name for t in tools)})


routes = [
    Route("/health", health),
    Route("/sse", handle_sse),
    Mount("/messages/", app=sse.handle_post_message),
]

middleware = [
    Middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )
]

app = Starlette(
    debug=False,
    middleware=middleware,
    routes=routes,
)
