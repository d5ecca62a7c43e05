"""Plain HTTP front end for a :class:`MapStore`.

POST /ingest?wall_clock=...&run_id=...&zones=a,b   body: detections JSONL
GET  /zones/<zone_id>                               zone state JSON
GET  /map                                           GeoJSON snapshot
"""

from __future__ import annotations

import json
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, unquote, urlsplit

from ..classifier import Detection
from .occupancy import dumps_geojson, export_geojson, query_zone, record_from_detections
from .store import MapStore


def make_handler(store: MapStore):
    class Handler(BaseHTTPRequestHandler):
        def _send(self, status: int, body: str, content_type: str = "application/json"):
            data = body.encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def _error(self, status: HTTPStatus, message: str):
            self._send(status, json.dumps({"error": message}) + "\n")

        def do_GET(self):
            path = urlsplit(self.path).path
            if path == "/map":
                self._send(HTTPStatus.OK, dumps_geojson(export_geojson(store.map)),
                           "application/geo+json")
            elif path.startswith("/zones/"):
                state = query_zone(store.map, unquote(path[len("/zones/"):]))
                if state is None:
                    self._error(HTTPStatus.NOT_FOUND, "unknown zone")
                else:
                    self._send(HTTPStatus.OK, json.dumps(state.to_dict(), sort_keys=True) + "\n")
            else:
                self._error(HTTPStatus.NOT_FOUND, "not found")

        def do_POST(self):
            url = urlsplit(self.path)
            if url.path != "/ingest":
                self._error(HTTPStatus.NOT_FOUND, "not found")
                return
            query = parse_qs(url.query)
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length).decode("utf-8")
            try:
                detections = [Detection.from_dict(json.loads(line))
                              for line in body.splitlines() if line.strip()]
                if "wall_clock" not in query:
                    raise ValueError("wall_clock query parameter is required")
                run_ids = {d.run_id for d in detections}
                run_id = query.get("run_id", [None])[0] or (run_ids.pop() if len(run_ids) == 1 else None)
                if not run_id:
                    raise ValueError("run_id missing or ambiguous")
                observed = [z for z in query.get("zones", [""])[0].split(",") if z]
                record = record_from_detections(detections, list(store.map.zones.values()), run_id,
                                                query["wall_clock"][0], observed)
            except (ValueError, TypeError, KeyError) as exc:
                self._error(HTTPStatus.BAD_REQUEST, str(exc))
                return
            result = store.ingest(record)
            self._send(HTTPStatus.OK, json.dumps({
                "run_id": run_id,
                "zones": sorted(record.zones),
                "stale": [e.zone_id for e in result.stale],
                "unknown_zones": result.unknown_zones,
            }) + "\n")

        def log_message(self, format, *args):  # keep test output quiet
            pass

    return Handler


def make_server(store: MapStore, host: str = "127.0.0.1", port: int = 8000) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), make_handler(store))
