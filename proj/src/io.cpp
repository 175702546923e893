#include "regionet/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <system_error>

#include "regionet/errors.hpp"

namespace regionet {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
    return data;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("error while writing '" + path.string() + "'");
}

// Lines without the trailing newline; a final empty segment (trailing
// newline at EOF) is dropped.
std::vector<std::string> split_lines(const std::string& data) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= data.size()) {
        std::size_t end = data.find('\n', start);
        if (end == std::string::npos) end = data.size();
        std::string line = data.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        if (end == data.size()) break;
        start = end + 1;
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(const std::string& field, const std::filesystem::path& path,
                    std::size_t line_no) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw FormatError(path.string() + ":" + std::to_string(line_no) +
                          ": not a number: '" + field + "'");
    return value;
}

std::uint32_t parse_label(const std::string& field, const std::filesystem::path& path,
                          std::size_t line_no) {
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw FormatError(path.string() + ":" + std::to_string(line_no) +
                          ": not a community label: '" + field + "'");
    return value;
}

void expect_header(const std::vector<std::string>& lines, const std::string& header,
                   const std::filesystem::path& path) {
    if (lines.empty() || lines[0] != header)
        throw FormatError(path.string() + ": expected header '" + header + "'");
}

struct EdgeRow {
    std::string src, dst;
    double weight;
};

std::vector<EdgeRow> read_edge_rows(const std::filesystem::path& path) {
    const auto lines = split_lines(read_file(path));
    expect_header(lines, "src,dst,weight", path);
    std::vector<EdgeRow> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        if (fields.size() != 3)
            throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                              ": expected 3 fields, got " + std::to_string(fields.size()));
        const double w = parse_double(fields[2], path, i + 1);
        if (w < 0.0)
            throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                              ": negative weight");
        rows.push_back({fields[0], fields[1], w});
    }
    return rows;
}

WeightedDigraph graph_from_rows(const std::vector<EdgeRow>& rows, std::vector<NodeRecord> nodes,
                                const std::filesystem::path& path) {
    std::unordered_map<std::string, NodeId> index;
    index.reserve(nodes.size());
    for (NodeId v = 0; v < nodes.size(); ++v) index.emplace(nodes[v].id, v);
    std::vector<Arc> arcs;
    arcs.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = index.find(rows[i].src);
        const auto dst = index.find(rows[i].dst);
        if (src == index.end() || dst == index.end())
            throw FormatError(path.string() + ":" + std::to_string(i + 2) +
                              ": unknown node id '" +
                              (src == index.end() ? rows[i].src : rows[i].dst) + "'");
        arcs.push_back({src->second, dst->second, rows[i].weight});
    }
    return WeightedDigraph::from_arcs(std::move(nodes), std::move(arcs));
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

WeightedDigraph load_edge_list(const std::filesystem::path& path) {
    const auto rows = read_edge_rows(path);
    std::set<std::string> ids;
    for (const EdgeRow& r : rows) {
        ids.insert(r.src);
        ids.insert(r.dst);
    }
    std::vector<NodeRecord> nodes;
    nodes.reserve(ids.size());
    for (const std::string& id : ids) nodes.push_back({.id = id});
    return graph_from_rows(rows, std::move(nodes), path);
}

WeightedDigraph load_edge_list(const std::filesystem::path& path,
                               std::vector<NodeRecord> nodes) {
    return graph_from_rows(read_edge_rows(path), std::move(nodes), path);
}

void write_edge_list(const WeightedDigraph& g, const std::filesystem::path& path) {
    // Rows ordered by id strings, not internal indices, so that loading and
    // rewriting a file reproduces it byte for byte.
    std::vector<NodeId> order(g.n());
    for (NodeId v = 0; v < g.n(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return g.node(a).id < g.node(b).id; });
    std::string out = "src,dst,weight\n";
    for (NodeId u : order) {
        const auto dsts = g.out_neighbors(u);
        const auto ws = g.out_weights(u);
        std::vector<std::size_t> cols(dsts.size());
        for (std::size_t e = 0; e < cols.size(); ++e) cols[e] = e;
        std::sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
            return g.node(dsts[a]).id < g.node(dsts[b]).id;
        });
        for (std::size_t e : cols) {
            out += g.node(u).id;
            out += ',';
            out += g.node(dsts[e]).id;
            out += ',';
            out += format_double(ws[e]);
            out += '\n';
        }
    }
    write_file(path, out);
}

std::vector<NodeRecord> load_nodes(const std::filesystem::path& path) {
    const auto lines = split_lines(read_file(path));
    expect_header(lines, "id,lon,lat,market_share,region_l1,region_l2", path);
    std::vector<NodeRecord> records;
    records.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        if (fields.size() != 6)
            throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                              ": expected 6 fields, got " + std::to_string(fields.size()));
        NodeRecord rec;
        rec.id = fields[0];
        if (rec.id.empty())
            throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": empty node id");
        if (!fields[1].empty()) rec.longitude = parse_double(fields[1], path, i + 1);
        if (!fields[2].empty()) rec.latitude = parse_double(fields[2], path, i + 1);
        if (!fields[3].empty()) rec.market_share = parse_double(fields[3], path, i + 1);
        if (!fields[4].empty()) rec.region_labels.push_back({1, fields[4]});
        if (!fields[5].empty()) rec.region_labels.push_back({2, fields[5]});
        records.push_back(std::move(rec));
    }
    return records;
}

void write_nodes(const std::vector<NodeRecord>& records, const std::filesystem::path& path) {
    std::string out = "id,lon,lat,market_share,region_l1,region_l2\n";
    for (const NodeRecord& rec : records) {
        out += rec.id;
        out += ',';
        if (rec.longitude) out += format_double(*rec.longitude);
        out += ',';
        if (rec.latitude) out += format_double(*rec.latitude);
        out += ',';
        if (rec.market_share) out += format_double(*rec.market_share);
        out += ',';
        if (auto l1 = rec.region_label(1)) out += *l1;
        out += ',';
        if (auto l2 = rec.region_label(2)) out += *l2;
        out += '\n';
    }
    write_file(path, out);
}

std::string partition_to_string(const WeightedDigraph& g, const Partition& p) {
    if (p.n() != g.n())
        throw std::invalid_argument("partition does not cover the graph's nodes");
    const Partition canon = p.canonicalized();
    std::vector<NodeId> order(g.n());
    for (NodeId v = 0; v < g.n(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return g.node(a).id < g.node(b).id; });
    std::string out = "node_id,community\n";
    for (NodeId v : order)
        out += g.node(v).id + "," + std::to_string(canon.label(v)) + "\n";
    return out;
}

void write_partition(const WeightedDigraph& g, const Partition& p,
                     const std::filesystem::path& path) {
    write_file(path, partition_to_string(g, p));
}

Partition load_partition_for(const WeightedDigraph& g, const std::filesystem::path& path) {
    const auto pairs = load_partition_pairs(path);
    if (pairs.size() != g.n())
        throw FormatError(path.string() + ": partition covers " + std::to_string(pairs.size()) +
                          " nodes, graph has " + std::to_string(g.n()));
    std::vector<std::uint32_t> labels(g.n());
    std::vector<char> seen(g.n(), 0);
    for (const auto& [id, label] : pairs) {
        const auto v = g.index_of(id);
        if (!v) throw FormatError(path.string() + ": unknown node id '" + id + "'");
        if (seen[*v]) throw FormatError(path.string() + ": duplicate node id '" + id + "'");
        seen[*v] = 1;
        labels[*v] = label;
    }
    return Partition(std::move(labels));
}

std::vector<std::pair<std::string, std::uint32_t>> load_partition_pairs(
    const std::filesystem::path& path) {
    const auto lines = split_lines(read_file(path));
    expect_header(lines, "node_id,community", path);
    std::vector<std::pair<std::string, std::uint32_t>> pairs;
    pairs.reserve(lines.size() - 1);
    std::set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        if (fields.size() != 2)
            throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                              ": expected 2 fields, got " + std::to_string(fields.size()));
        if (!seen.insert(fields[0]).second)
            throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                              ": duplicate node id '" + fields[0] + "'");
        pairs.emplace_back(fields[0], parse_label(fields[1], path, i + 1));
    }
    return pairs;
}

std::pair<Partition, Partition> align_partitions(
    const std::vector<std::pair<std::string, std::uint32_t>>& a,
    const std::vector<std::pair<std::string, std::uint32_t>>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("partitions cover different node counts (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                    ")");
    std::map<std::string, std::uint32_t> map_a(a.begin(), a.end());
    std::map<std::string, std::uint32_t> map_b(b.begin(), b.end());
    std::vector<std::uint32_t> labels_a, labels_b;
    labels_a.reserve(a.size());
    labels_b.reserve(b.size());
    for (const auto& [id, label] : map_a) {
        const auto it = map_b.find(id);
        if (it == map_b.end())
            throw std::invalid_argument("node '" + id + "' is missing from the second partition");
        labels_a.push_back(label);
        labels_b.push_back(it->second);
    }
    return {Partition(std::move(labels_a)), Partition(std::move(labels_b))};
}

void write_hierarchy(const WeightedDigraph& g, const HierarchicalPartition& h,
                     const std::filesystem::path& path) {
    if (h.level1.n() != g.n())
        throw std::invalid_argument("hierarchy does not cover the graph's nodes");
    std::vector<NodeId> order(g.n());
    for (NodeId v = 0; v < g.n(); ++v) order[v] = v;
    std::sort(order.begin(), order.end(),
              [&](NodeId a, NodeId b) { return g.node(a).id < g.node(b).id; });
    std::string out = "node_id,community_l1,community_l2\n";
    for (NodeId v : order)
        out += g.node(v).id + "," + std::to_string(h.level1.label(v)) + "," +
               std::to_string(h.sublabel[v]) + "\n";
    write_file(path, out);
}

std::vector<HierarchyRow> load_hierarchy_pairs(const std::filesystem::path& path) {
    const auto lines = split_lines(read_file(path));
    expect_header(lines, "node_id,community_l1,community_l2", path);
    std::vector<HierarchyRow> rows;
    rows.reserve(lines.size() - 1);
    std::set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_fields(lines[i]);
        if (fields.size() != 3)
            throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                              ": expected 3 fields, got " + std::to_string(fields.size()));
        if (!seen.insert(fields[0]).second)
            throw FormatError(path.string() + ":" + std::to_string(i + 1) +
                              ": duplicate node id '" + fields[0] + "'");
        rows.push_back({fields[0], parse_label(fields[1], path, i + 1),
                        parse_label(fields[2], path, i + 1)});
    }
    return rows;
}

Partition partition_from_region_labels(const std::vector<NodeRecord>& records, int level) {
    std::vector<std::uint32_t> labels(records.size());
    std::map<std::string, std::uint32_t> dense;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto label = records[i].region_label(level);
        if (!label)
            throw std::invalid_argument("node '" + records[i].id +
                                        "' has no region label at level " +
                                        std::to_string(level));
        labels[i] =
            dense.emplace(*label, static_cast<std::uint32_t>(dense.size())).first->second;
    }
    return Partition(std::move(labels));
}

} // namespace regionet
