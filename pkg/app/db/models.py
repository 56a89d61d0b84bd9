from datetime import datetime

from sqlalchemy import Boolean, CheckConstraint, Column, DateTime, Integer, String, Text

from app.db.database import Base


class WitnessArchive(Base):
    __tablename__ = "witness_archives"
    id = Column(Integer, primary_key=True, index=True)
    # SHA-256 of the canonical map JSON
    map_digest = Column(String(64), index=True)
    route = Column(String(32), index=True)
    group = Column(String(2))
    verdict = Column(String(8))
    all_pass = Column(Boolean, default=False, index=True)
    # circle-witness/1 document
    archive = Column(Text, nullable=False)
    created = Column(DateTime, default=datetime.utcnow)
    # refreshed when the archive is re-verified
    updated = Column(DateTime, default=datetime.utcnow, onupdate=datetime.utcnow)

    __table_args__ = (
        CheckConstraint('length(map_digest) = 64', name='check_map_digest_length'),
    )
