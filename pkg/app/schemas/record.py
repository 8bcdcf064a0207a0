"""
Record line schema for line-JSON and CSV inputs and the rejected-record sink
"""

from typing import Literal

from pydantic import Field

from app.models.record import MMSI_MAX, AisRecord, GeoPoint, RecordKind
from app.schemas.base import BaseSchema

RECORD_FIELDS = ("kind", "mmsi", "t", "lat", "lon", "sog", "type", "dest")


class RecordLine(BaseSchema):
    """
    One input line: {"kind","mmsi","t","lat","lon","sog"?,"type"?,"dest"?}
    """

    kind: Literal["pos", "static"]
    mmsi: int = Field(ge=0, le=MMSI_MAX)
    time: int = Field(alias="t", ge=0)
    lat: float = Field(ge=-90, le=90, allow_inf_nan=False)
    lon: float = Field(allow_inf_nan=False)
    sog: float | None = Field(default=None, ge=0, allow_inf_nan=False)
    vessel_type: int | None = Field(default=None, alias="type", ge=0, le=99)
    destination: str | None = Field(default=None, alias="dest")

    def to_record(self) -> AisRecord:
        return AisRecord(
            mmsi=self.mmsi,
            time=self.time,
            pos=GeoPoint(self.lat, self.lon),
            kind=RecordKind(self.kind),
            sog=self.sog,
            vessel_type=self.vessel_type,
            destination=self.destination or None,
        )

    @classmethod
    def from_record(cls, record: AisRecord) -> "RecordLine":
        return cls(
            kind=record.kind.value,
            mmsi=record.mmsi,
            t=record.time,
            lat=record.pos.lat,
            lon=record.pos.lon,
            sog=record.sog,
            type=record.vessel_type,
            dest=record.destination,
        )

    def to_line(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True)
