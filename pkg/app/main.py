from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi_pagination import add_pagination

from app.db.database import init_db
from app.routers import archives, maps


# Initialize Database on startup
@asynccontextmanager
async def lifespan(app: FastAPI):
    """Lifespan handler: initialize DB on startup and perform any teardown on shutdown."""
    init_db()
    yield

# Create FastAPI app
app = FastAPI(title="Circle reversibility engine", lifespan=lifespan)

# Add pagination support
add_pagination(app)

app.include_router(maps.router)
app.include_router(archives.router)
