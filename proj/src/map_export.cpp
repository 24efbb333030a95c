#include "litter/map_export.hpp"

#include <algorithm>
#include <cmath>

#include "litter/error.hpp"

namespace litter {

namespace {

constexpr std::string_view kDataOpen = R"(<script id="litter-data" type="application/json">)";
constexpr std::string_view kDataClose = "</script>";

std::string escape_html(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

// '<', '>' and '&' only occur inside JSON strings, where \u escapes are
// equivalent, so the payload can never close the script element.
std::string script_safe_json(const nlohmann::ordered_json& doc) {
  const std::string raw = doc.dump();
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (c == '<')
      out += "\\u003c";
    else if (c == '>')
      out += "\\u003e";
    else if (c == '&')
      out += "\\u0026";
    else
      out += c;
  }
  return out;
}

DistanceMethod method_from(const std::string& s) {
  if (s == "ground-plane") return DistanceMethod::ground_plane;
  if (s == "fixed-distance") return DistanceMethod::fixed_distance;
  throw Error(Errc::malformed_json, "unknown placement method '" + s + "'");
}

constexpr std::string_view kViewer = R"JS(
(function () {
  var data = JSON.parse(document.getElementById('litter-data').textContent);
  var canvas = document.getElementById('map');
  var ctx = canvas.getContext('2d');
  var palette = ['#e6194b', '#3cb44b', '#4363d8', '#f58231', '#911eb4',
                 '#46f0f0', '#f032e6', '#bcf60c', '#008080', '#9a6324'];
  var classes = {};
  var minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  function visit(c) {
    minX = Math.min(minX, c[0]); maxX = Math.max(maxX, c[0]);
    minY = Math.min(minY, c[1]); maxY = Math.max(maxY, c[1]);
  }
  data.features.forEach(function (f) {
    var g = f.geometry;
    if (g.type === 'Point') visit(g.coordinates);
    else if (g.type === 'Polygon') g.coordinates[0].forEach(visit);
    var cls = f.properties['class'];
    if (cls !== undefined && !(cls in classes)) classes[cls] = Object.keys(classes).length;
  });
  if (!isFinite(minX)) { minX = -1; maxX = 1; minY = -1; maxY = 1; }
  var midLat = (minY + maxY) / 2;
  var kx = Math.cos(midLat * Math.PI / 180);
  var view = { cx: (minX + maxX) / 2, cy: midLat, scale: 1 };
  function fit() {
    var w = Math.max((maxX - minX) * kx, 1e-5), h = Math.max(maxY - minY, 1e-5);
    view.scale = 0.9 * Math.min(canvas.width / w, canvas.height / h);
  }
  function toScreen(c) {
    return [canvas.width / 2 + (c[0] - view.cx) * kx * view.scale,
            canvas.height / 2 - (c[1] - view.cy) * view.scale];
  }
  function draw() {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    data.features.forEach(function (f) {
      var g = f.geometry;
      if (g.type !== 'Polygon') return;
      ctx.beginPath();
      g.coordinates[0].forEach(function (c, i) {
        var p = toScreen(c);
        if (i === 0) ctx.moveTo(p[0], p[1]); else ctx.lineTo(p[0], p[1]);
      });
      ctx.closePath();
      ctx.fillStyle = 'rgba(255, 140, 0, ' + Math.min(0.8, 0.1 + 0.05 * f.properties.total) + ')';
      ctx.fill();
      ctx.strokeStyle = '#888';
      ctx.stroke();
    });
    data.features.forEach(function (f) {
      var g = f.geometry;
      if (g.type !== 'Point') return;
      var p = toScreen(g.coordinates);
      ctx.beginPath();
      ctx.arc(p[0], p[1], 4, 0, 2 * Math.PI);
      ctx.fillStyle = palette[classes[f.properties['class']] % palette.length];
      ctx.fill();
    });
  }
  var legend = document.getElementById('legend');
  Object.keys(classes).forEach(function (name) {
    var row = document.createElement('div');
    var swatch = document.createElement('span');
    swatch.className = 'swatch';
    swatch.style.background = palette[classes[name] % palette.length];
    row.appendChild(swatch);
    row.appendChild(document.createTextNode(name));
    legend.appendChild(row);
  });
  var drag = null;
  canvas.addEventListener('mousedown', function (e) { drag = [e.clientX, e.clientY]; });
  window.addEventListener('mouseup', function () { drag = null; });
  window.addEventListener('mousemove', function (e) {
    if (!drag) return;
    view.cx -= (e.clientX - drag[0]) / (kx * view.scale);
    view.cy += (e.clientY - drag[1]) / view.scale;
    drag = [e.clientX, e.clientY];
    draw();
  });
  canvas.addEventListener('wheel', function (e) {
    e.preventDefault();
    view.scale *= e.deltaY < 0 ? 1.2 : 1 / 1.2;
    draw();
  });
  function resize() {
    canvas.width = canvas.clientWidth;
    canvas.height = canvas.clientHeight;
    draw();
  }
  window.addEventListener('resize', resize);
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  fit();
  draw();
})();
)JS";

}  // namespace

nlohmann::ordered_json to_geojson(std::span<const GeoDetection> points) {
  std::vector<const GeoDetection*> sorted;
  sorted.reserve(points.size());
  for (const auto& p : points) sorted.push_back(&p);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return source_less(*a, *b); });

  nlohmann::ordered_json fc;
  fc["type"] = "FeatureCollection";
  auto& features = fc["features"] = nlohmann::ordered_json::array();
  for (const auto* p : sorted) {
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", {p->position.lon_deg, p->position.lat_deg}}};
    f["properties"] = {{"class", p->target_class},
                       {"score", p->score},
                       {"image_id", id_to_json(p->image_id)},
                       {"annotation_id", id_to_json(p->annotation_id)},
                       {"bearing_deg", p->bearing_deg},
                       {"distance_m", p->distance_m},
                       {"method", to_string(p->method)}};
    features.push_back(std::move(f));
  }
  return fc;
}

std::vector<GeoDetection> from_geojson(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc.at("features").is_array())
    throw Error(Errc::malformed_json, "expected a GeoJSON FeatureCollection");
  std::vector<GeoDetection> out;
  try {
    for (const auto& f : doc.at("features")) {
      const auto& g = f.at("geometry");
      if (g.at("type") != "Point") continue;
      const auto& props = f.at("properties");
      GeoDetection d;
      d.position = {g.at("coordinates").at(1).get<double>(), g.at("coordinates").at(0).get<double>()};
      d.target_class = props.at("class").get<std::string>();
      d.score = props.at("score").get<double>();
      d.image_id = id_from_json(props.at("image_id"), "image_id");
      d.annotation_id = props.contains("annotation_id") ? id_from_json(props.at("annotation_id"), "annotation_id")
                                                        : Id(static_cast<std::int64_t>(out.size() + 1));
      d.bearing_deg = props.value("bearing_deg", 0.0);
      d.distance_m = props.at("distance_m").get<double>();
      d.method = method_from(props.at("method").get<std::string>());
      if (!is_valid(d.position)) throw Error(Errc::malformed_json, "coordinate out of range");
      out.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_json, e.what());
  }
  return out;
}

std::pair<double, double> project_local(const GeoPoint& p, const GeoPoint& origin, double radius_m) noexcept {
  const double x = radius_m * deg_to_rad(p.lon_deg - origin.lon_deg) * std::cos(deg_to_rad(origin.lat_deg));
  const double y = radius_m * deg_to_rad(p.lat_deg - origin.lat_deg);
  return {x, y};
}

GeoPoint unproject_local(double x_m, double y_m, const GeoPoint& origin, double radius_m) noexcept {
  return {origin.lat_deg + rad_to_deg(y_m / radius_m),
          origin.lon_deg + rad_to_deg(x_m / (radius_m * std::cos(deg_to_rad(origin.lat_deg))))};
}

std::int64_t cell_coordinate(double coord_m, double cell_m) noexcept {
  const double q = coord_m / cell_m;
  const double edge = std::nearbyint(q);
  if (std::abs(coord_m - edge * cell_m) <= kCellEdgeSnapM) return static_cast<std::int64_t>(edge);
  return static_cast<std::int64_t>(std::floor(q));
}

CellIndex cell_of(const GeoPoint& p, double cell_m, const GeoPoint& origin, double radius_m) noexcept {
  const auto [x, y] = project_local(p, origin, radius_m);
  return {cell_coordinate(y, cell_m), cell_coordinate(x, cell_m)};
}

std::vector<GridCell> grid_bin(std::span<const GeoDetection> points, double cell_m, const GeoPoint& origin,
                               double radius_m) {
  if (!(cell_m > 0.0)) throw std::invalid_argument("grid_bin: cell size must be positive");
  std::map<CellIndex, GridCell> cells;
  for (const auto& p : points) {
    const CellIndex idx = cell_of(p.position, cell_m, origin, radius_m);
    auto [it, fresh] = cells.try_emplace(idx);
    GridCell& cell = it->second;
    if (fresh) {
      cell.index = idx;
      const double x0 = static_cast<double>(idx.col) * cell_m;
      const double y0 = static_cast<double>(idx.row) * cell_m;
      cell.bounds = {unproject_local(x0, y0, origin, radius_m), unproject_local(x0 + cell_m, y0, origin, radius_m),
                     unproject_local(x0 + cell_m, y0 + cell_m, origin, radius_m),
                     unproject_local(x0, y0 + cell_m, origin, radius_m)};
    }
    ++cell.counts[p.target_class];
    ++cell.total;
  }
  std::vector<GridCell> out;
  out.reserve(cells.size());
  for (auto& [_, c] : cells) out.push_back(std::move(c));
  return out;
}

nlohmann::ordered_json grid_to_geojson(std::span<const GridCell> cells) {
  nlohmann::ordered_json fc;
  fc["type"] = "FeatureCollection";
  auto& features = fc["features"] = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    auto ring = nlohmann::ordered_json::array();
    for (const auto& b : c.bounds) ring.push_back({b.lon_deg, b.lat_deg});
    ring.push_back({c.bounds[0].lon_deg, c.bounds[0].lat_deg});
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.counts) counts[k] = v;
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Polygon"}, {"coordinates", nlohmann::ordered_json::array({ring})}};
    f["properties"] = {{"row", c.index.row}, {"col", c.index.col}, {"total", c.total}, {"counts", counts}};
    features.push_back(std::move(f));
  }
  return fc;
}

std::string render_html(const nlohmann::ordered_json& geojson, std::string_view title) {
  const std::string safe_title = escape_html(title);
  std::size_t points = 0;
  if (geojson.contains("features"))
    for (const auto& f : geojson.at("features"))
      if (f.at("geometry").at("type") == "Point") ++points;

  std::string html;
  html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>";
  html += safe_title;
  html += "</title>\n<style>\n"
          "html, body { margin: 0; height: 100%; font-family: sans-serif; }\n"
          "#map { position: absolute; top: 3em; left: 0; right: 0; bottom: 0; width: 100%; height: calc(100% - 3em); "
          "background: #f4f1ea; cursor: grab; }\n"
          "header { height: 3em; line-height: 3em; padding: 0 1em; background: #2b3a42; color: #fff; }\n"
          "#legend { position: absolute; top: 4em; right: 1em; background: rgba(255,255,255,0.9); padding: 0.5em; "
          "font-size: 0.85em; }\n"
          ".swatch { display: inline-block; width: 0.8em; height: 0.8em; margin-right: 0.4em; border-radius: 50%; }\n"
          "</style>\n</head>\n<body>\n<header>";
  html += safe_title;
  html += " &middot; " + std::to_string(points) + " detections</header>\n";
  html += "<canvas id=\"map\"></canvas>\n<div id=\"legend\"></div>\n";
  html += kDataOpen;
  html += script_safe_json(geojson);
  html += kDataClose;
  html += "\n<script>";
  html += kViewer;
  html += "</script>\n</body>\n</html>\n";
  return html;
}

nlohmann::json embedded_geojson(std::string_view html) {
  const auto start = html.find(kDataOpen);
  if (start == std::string_view::npos) throw Error(Errc::malformed_json, "no embedded map data");
  const auto body = start + kDataOpen.size();
  const auto end = html.find(kDataClose, body);
  if (end == std::string_view::npos) throw Error(Errc::malformed_json, "unterminated map data");
  try {
    return nlohmann::json::parse(html.substr(body, end - body));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::malformed_json, e.what());
  }
}

}  // namespace litter
