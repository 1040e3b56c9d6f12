#include "xkm/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace xkm::io {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, std::ios::binary | mode);
  if (!out) throw Error(ErrorCode::InvalidParameter, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex(std::string_view s) {
  const std::string str(trim(s));
  if (str.empty()) parse_error("empty hex-float");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(str.c_str(), &end);
  if (end != str.c_str() + str.size() || errno == ERANGE) {
    parse_error("malformed hex-float '" + str + "'");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Points

Dataset read_points_csv(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    row.assign(fields.size(), 0.0);
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size() && numeric; ++j) {
      numeric = parse_number(fields[j], row[j]);
    }
    if (!numeric) {
      if (first_row) {
        first_row = false;
        continue;
      }
      parse_error("line " + std::to_string(line_no) + ": expected " +
                  (data.dim() ? std::to_string(data.dim()) : std::string("numeric")) +
                  " finite decimal fields");
    }
    first_row = false;
    if (!data.empty() && row.size() != data.dim()) {
      parse_error("line " + std::to_string(line_no) + ": " + std::to_string(row.size()) +
                  " fields, expected " + std::to_string(data.dim()));
    }
    data.push_back(row);
  }
  if (data.empty()) parse_error("no data rows");
  return data;
}

Dataset read_points_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_points_csv(in);
  } catch (const Error& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

CenterSet read_centers_csv(const std::filesystem::path& path) {
  auto data = read_points_csv(path);
  return CenterSet(data.dim(), data.flat());
}

void write_points_csv(std::ostream& out, const PointMatrix& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out << ',';
      out << format_double(p[j]);
    }
    out << '\n';
  }
}

void write_points_csv(const std::filesystem::path& path, const PointMatrix& points) {
  auto out = open_out(path, std::ios::trunc);
  write_points_csv(out, points);
}

// ---------------------------------------------------------------------------
// Tree file

namespace {

ordered_json point_json(const Point& p) {
  ordered_json arr = ordered_json::array();
  for (double v : p) arr.push_back(v);
  return arr;
}

ordered_json node_json(const ThresholdTree& tree, NodeId id) {
  ordered_json j;
  if (const auto* in = std::get_if<InternalNode>(&tree.node(id))) {
    j["type"] = "internal";
    j["dim"] = in->cut.dim;
    j["threshold"] = format_hex(in->cut.threshold);
    j["threshold_decimal"] = in->cut.threshold;
    j["left"] = node_json(tree, in->left);
    j["right"] = node_json(tree, in->right);
  } else {
    const auto& leaf = tree.leaf(id);
    j["type"] = "leaf";
    j["center_index"] = leaf.center_index;
    j["original_center"] = point_json(leaf.original_center);
    if (leaf.refined_center) j["refined_center"] = point_json(*leaf.refined_center);
  }
  return j;
}

template <typename T>
T field(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    parse_error(std::string("field '") + key + "' has the wrong type");
  }
}

Point point_from_json(const ordered_json& j, std::size_t d, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array");
  Point p;
  for (const auto& v : j) {
    if (!v.is_number()) parse_error(std::string(what) + " must hold numbers");
    p.push_back(v.get<double>());
  }
  if (p.size() != d) parse_error(std::string(what) + " has the wrong dimension");
  return p;
}

NodeId parse_node(const ordered_json& j, std::size_t d, std::vector<TreeNode>& nodes,
                  std::size_t depth) {
  if (depth > 100000) parse_error("tree nesting too deep");
  const auto type = field<std::string>(j, "type");
  const NodeId id = nodes.size();
  if (type == "leaf") {
    LeafNode leaf;
    leaf.center_index = field<std::size_t>(j, "center_index");
    leaf.original_center = point_from_json(j.at("original_center"), d, "original_center");
    if (j.contains("refined_center")) {
      leaf.refined_center = point_from_json(j.at("refined_center"), d, "refined_center");
    }
    nodes.emplace_back(std::move(leaf));
    return id;
  }
  if (type != "internal") parse_error("unknown node type '" + type + "'");
  InternalNode in;
  in.cut.dim = field<std::size_t>(j, "dim");
  if (in.cut.dim >= d) parse_error("cut dimension out of range");
  in.cut.threshold = parse_hex(field<std::string>(j, "threshold"));
  if (!std::isfinite(in.cut.threshold)) parse_error("non-finite threshold");
  nodes.emplace_back(in);
  if (!j.contains("left") || !j.contains("right")) parse_error("internal node needs two children");
  in.left = parse_node(j.at("left"), d, nodes, depth + 1);
  in.right = parse_node(j.at("right"), d, nodes, depth + 1);
  nodes[id] = in;
  return id;
}

}  // namespace

std::string serialize_tree(const TreeFile& file) {
  ordered_json j;
  j["schema_version"] = file.schema_version;
  j["k"] = file.k;
  j["d"] = file.d;
  j["delta"] = file.delta;
  j["seed"] = file.seed;
  j["root"] = node_json(file.tree, 0);
  return j.dump(2) + "\n";
}

TreeFile parse_tree(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_error(std::string("tree file is not valid JSON: ") + e.what());
  }
  TreeFile file;
  file.schema_version = field<int>(j, "schema_version");
  if (file.schema_version != kTreeSchemaVersion) {
    parse_error("unsupported tree schema version " + std::to_string(file.schema_version));
  }
  file.k = field<std::size_t>(j, "k");
  file.d = field<std::size_t>(j, "d");
  file.delta = field<double>(j, "delta");
  file.seed = field<std::uint64_t>(j, "seed");
  if (file.d == 0) parse_error("dimension must be positive");
  if (!j.contains("root")) parse_error("missing field 'root'");
  std::vector<TreeNode> nodes;
  parse_node(j.at("root"), file.d, nodes, 0);
  file.tree = ThresholdTree(std::move(nodes));
  return file;
}

void save_tree(const std::filesystem::path& path, const TreeFile& file) {
  auto out = open_out(path, std::ios::trunc);
  out << serialize_tree(file);
}

TreeFile load_tree(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_tree(buf.str());
}

// ---------------------------------------------------------------------------
// Trace file

void write_trace(std::ostream& out, const TraceHeader& header, const BuildTrace& trace) {
  out << "# xkm-trace v1\n";
  out << "# k=" << header.k << " d=" << header.d << " delta=" << format_hex(header.delta)
      << " seed=" << header.seed << " steps=" << trace.steps.size() << '\n';
  for (const auto& step : trace.steps) {
    out << step.step << ' ' << step.draw.dim << ' ' << format_hex(step.draw.theta) << ' '
        << (step.draw.sigma > 0 ? "+1" : "-1");
    for (const auto& node : step.nodes) {
      out << ' ' << node.node;
      if (is_split(node.outcome)) {
        out << ":split:" << node.left_child << ':' << node.right_child;
      } else {
        out << ":fail";
      }
    }
    out << '\n';
  }
}

BuildTrace read_trace(std::istream& in, TraceHeader* header) {
  BuildTrace trace;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    parse_error("trace line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (line.front() == '#') {
      if (header && line.rfind("# k=", 0) == 0) {
        std::istringstream hs(line.substr(2));
        std::string tok;
        while (hs >> tok) {
          const auto eq = tok.find('=');
          if (eq == std::string::npos) continue;
          const auto key = tok.substr(0, eq);
          const auto val = tok.substr(eq + 1);
          if (key == "k") header->k = std::stoull(val);
          if (key == "d") header->d = std::stoull(val);
          if (key == "delta") header->delta = parse_hex(val);
          if (key == "seed") header->seed = std::stoull(val);
        }
      }
      continue;
    }
    std::istringstream ls(line);
    StepRecord rec;
    std::string theta, sigma;
    if (!(ls >> rec.step >> rec.draw.dim >> theta >> sigma)) fail("expected step, dim, theta, sigma");
    rec.draw.theta = parse_hex(theta);
    if (sigma == "+1") {
      rec.draw.sigma = 1;
    } else if (sigma == "-1") {
      rec.draw.sigma = -1;
    } else {
      fail("sigma must be +1 or -1");
    }
    std::string tok;
    while (ls >> tok) {
      NodeRecord nr;
      const auto first = tok.find(':');
      if (first == std::string::npos) fail("malformed node outcome '" + tok + "'");
      nr.node = std::stoull(tok.substr(0, first));
      const auto rest = tok.substr(first + 1);
      if (rest == "fail") {
        nr.outcome = SplitFailure{};
      } else if (rest.rfind("split:", 0) == 0) {
        unsigned long long l = 0, r = 0;
        if (std::sscanf(rest.c_str() + 6, "%llu:%llu", &l, &r) != 2) fail("malformed split");
        nr.outcome = Split{};
        nr.left_child = l;
        nr.right_child = r;
      } else {
        fail("unknown outcome '" + rest + "'");
      }
      rec.nodes.push_back(std::move(nr));
    }
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Reports

std::string_view report_header() {
  return "k,delta,seed,leaf_count,distinct_centers,tree_cost,ref_cost,ratio,runtime_ms";
}

std::string format_report_row(const ReportRow& r) {
  std::ostringstream os;
  os << r.k << ',' << format_double(r.delta) << ',' << r.seed << ',' << r.leaf_count << ','
     << r.distinct_centers << ',' << format_double(r.tree_cost) << ','
     << format_double(r.ref_cost) << ',' << format_double(r.ratio) << ','
     << format_double(r.runtime_ms);
  return os.str();
}

void write_report_rows(const std::filesystem::path& path, const std::vector<ReportRow>& rows,
                       bool append) {
  std::error_code ec;
  const bool fresh = !append || !std::filesystem::exists(path, ec) ||
                     std::filesystem::file_size(path, ec) == 0;
  auto out = open_out(path, append ? std::ios::app : std::ios::trunc);
  if (fresh) out << report_header() << '\n';
  for (const auto& r : rows) out << format_report_row(r) << '\n';
}

std::vector<ReportRow> read_report(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != report_header()) {
    parse_error(path.string() + ": missing report header");
  }
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    std::vector<double> v(f.size());
    bool ok = f.size() == 9;
    for (std::size_t i = 0; ok && i < f.size(); ++i) {
      const std::string s(trim(f[i]));
      char* end = nullptr;
      v[i] = std::strtod(s.c_str(), &end);
      ok = !s.empty() && end == s.c_str() + s.size();
    }
    if (!ok) parse_error(path.string() + ": line " + std::to_string(line_no) + " malformed");
    ReportRow r;
    r.k = static_cast<std::size_t>(v[0]);
    r.delta = v[1];
    r.seed = std::stoull(std::string(trim(f[2])));
    r.leaf_count = static_cast<std::size_t>(v[3]);
    r.distinct_centers = static_cast<std::size_t>(v[4]);
    r.tree_cost = v[5];
    r.ref_cost = v[6];
    r.ratio = v[7];
    r.runtime_ms = v[8];
    rows.push_back(r);
  }
  return rows;
}

std::string_view stats_header() {
  return "experiment,metric,k,d,delta,trials,mean,stddev,ci95_half_width,median,bound,flag";
}

void write_stats_rows(const std::filesystem::path& path, const std::vector<StatsRow>& rows) {
  auto out = open_out(path, std::ios::trunc);
  out << stats_header() << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.metric << ',' << r.k << ',' << r.d << ','
        << format_double(r.delta) << ',' << r.stats.trials << ',' << format_double(r.stats.mean)
        << ',' << format_double(r.stats.stddev) << ',' << format_double(r.stats.ci95_half_width)
        << ',' << format_double(r.stats.median()) << ',' << format_double(r.bound) << ','
        << (r.flag ? 1 : 0) << '\n';
  }
}

}  // namespace xkm::io
