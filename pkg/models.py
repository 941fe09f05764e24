"""
Database models for the ISB run catalog.

Every successful command records its manifest here so earlier runs and their
output files can be found again by command or checksum.
"""

import json
import os
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from sqlalchemy import Column, DateTime, ForeignKey, Integer, String, Text, create_engine
from sqlalchemy.orm import declarative_base, relationship, selectinload, sessionmaker
from sqlalchemy.sql import func

from config import DATABASE_CONFIG
from errors import ConfigError

Base = declarative_base()


class Run(Base):
    """
    One invocation of an `isb` command.
    """
    __tablename__ = 'runs'

    id = Column(Integer, primary_key=True, autoincrement=True)
    command = Column(String(32), nullable=False, index=True)
    output_dir = Column(String(500), nullable=False)
    code_version = Column(String(32), nullable=False)
    config_json = Column(Text, nullable=False)  # config echo from the manifest
    started_at = Column(DateTime, nullable=False)
    finished_at = Column(DateTime, nullable=False)
    status = Column(String(16), nullable=False, default='ok')
    recorded_at = Column(DateTime, server_default=func.now())

    outputs = relationship("RunOutput", back_populates="run", cascade="all, delete-orphan")

    @property
    def config(self) -> dict:
        return json.loads(self.config_json)

    def __repr__(self):
        return f"<Run(id={self.id}, command='{self.command}', status='{self.status}')>"


class RunOutput(Base):
    """
    A file written by a run, with its checksum.
    """
    __tablename__ = 'run_outputs'

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey('runs.id'), nullable=False)
    filename = Column(String(255), nullable=False)
    sha256 = Column(String(64), nullable=False, index=True)
    size_bytes = Column(Integer, nullable=False)

    run = relationship("Run", back_populates="outputs")

    def __repr__(self):
        return f"<RunOutput(id={self.id}, run_id={self.run_id}, filename='{self.filename}')>"


def _naive(stamp: str) -> datetime:
    # SQLite stores DateTime without an offset; keep UTC wall time
    return datetime.fromisoformat(stamp).replace(tzinfo=None)


def resolve_database_url(database_url: Optional[str] = None, output_dir: Optional[str] = None) -> str:
    """Explicit URL, then $ISB_DATABASE_URL, then a SQLite file in the output directory."""
    if database_url:
        return database_url
    database_url = os.getenv(DATABASE_CONFIG['url_env'])
    if database_url:
        return database_url
    if output_dir is None:
        raise ConfigError(f"{DATABASE_CONFIG['url_env']} environment variable not set and no output directory given")
    path = Path(output_dir) / DATABASE_CONFIG['sqlite_file']
    return f"sqlite:///{path.resolve()}"


class DatabaseManager:
    """
    Manages database connections and operations for the run catalog.
    """

    def __init__(self, database_url: Optional[str] = None, output_dir: Optional[str] = None):
        database_url = resolve_database_url(database_url, output_dir)
        self.engine = create_engine(database_url)
        self.SessionLocal = sessionmaker(autocommit=False, autoflush=False, expire_on_commit=False,
                                         bind=self.engine)

    def create_tables(self):
        """Create all database tables."""
        Base.metadata.create_all(bind=self.engine)

    def get_session(self):
        """Get a database session."""
        return self.SessionLocal()

    def record_run(self, manifest, status: str = 'ok') -> int:
        """
        Store a finished run and its outputs.

        Args:
            manifest: RunManifest of the run
            status: 'ok' or 'partial'

        Returns:
            Catalog id of the new run
        """
        session = self.get_session()
        try:
            run = Run(
                command=manifest.command,
                output_dir=str(manifest.output_dir),
                code_version=manifest.code_version,
                config_json=json.dumps(manifest.config, sort_keys=True),
                started_at=_naive(manifest.started_at),
                finished_at=_naive(manifest.finished_at),
                status=status,
            )
            for entry in manifest.outputs:
                run.outputs.append(RunOutput(
                    filename=entry['filename'],
                    sha256=entry['sha256'],
                    size_bytes=entry['size_bytes'],
                ))
            session.add(run)
            session.commit()
            return run.id
        finally:
            session.close()

    def list_runs(self, command: Optional[str] = None, limit: int = 50) -> List[Run]:
        """
        Most recent runs first.

        Args:
            command: Only runs of this command
            limit: Maximum number of runs

        Returns:
            List of Run objects with their outputs loaded
        """
        session = self.get_session()
        try:
            query = session.query(Run).options(selectinload(Run.outputs))
            if command:
                query = query.filter(Run.command == command)
            return query.order_by(Run.id.desc()).limit(limit).all()
        finally:
            session.close()

    def latest_run(self, command: str) -> Optional[Run]:
        runs = self.list_runs(command=command, limit=1)
        return runs[0] if runs else None

    def find_outputs(self, sha256: str) -> List[RunOutput]:
        """
        All recorded files with the given checksum.
        """
        session = self.get_session()
        try:
            return session.query(RunOutput).options(selectinload(RunOutput.run)).filter(
                RunOutput.sha256 == sha256
            ).order_by(RunOutput.id).all()
        finally:
            session.close()
