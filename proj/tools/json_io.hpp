#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <coarsekit/coarse.hpp>
#include <coarsekit/coarsening.hpp>
#include <coarsekit/complexes.hpp>
#include <coarsekit/decomposition.hpp>
#include <coarsekit/kgroups.hpp>
#include <coarsekit/spaces.hpp>

namespace coarsekit::io {

using json = nlohmann::json;

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw MalformedInput("'" + path + "' is not valid JSON: " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

inline const json& field(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) throw MalformedInput(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline const json& array_field(const json& j, const char* key, const std::string& where)
{
    const auto& a = field(j, key, where);
    if (!a.is_array()) throw MalformedInput(where + ": field '" + key + "' must be an array");
    return a;
}

inline std::string as_string(const json& j, const std::string& where)
{
    if (!j.is_string()) throw MalformedInput(where + ": expected a string");
    return j.get<std::string>();
}

/// Integers and "num/den" (or decimal) strings.
inline Rational as_rational(const json& j, const std::string& where)
{
    if (j.is_number_integer()) return Rational(Integer(j.get<long>()));
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw MalformedInput(where + ": expected an integer or a \"num/den\" string");
}

inline long as_long(const json& j, const std::string& where)
{
    if (!j.is_number_integer()) throw MalformedInput(where + ": expected an integer");
    return j.get<long>();
}

inline json to_json(const Rational& r) { return format_rational(r); }

inline json to_json(const Integer& a) { return a.fits_slong_p() ? json(a.get_si()) : json(a.get_str()); }

inline json to_json(const SphericalLength& l)
{
    if (l.is_infinite()) return json{{"infinite", true}};
    json j{{"quarter_turns", format_rational(l.quarter_part())}};
    if (l.linear_part() != 0) j["linear"] = format_rational(l.linear_part());
    return j;
}

inline std::vector<Rational> parse_rational_list(const std::string& text)
{
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
    if (out.empty()) throw MalformedInput("empty list '" + text + "'");
    return out;
}

inline std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

// ---------------------------------------------------------------------------
// Spaces and covers
// ---------------------------------------------------------------------------

inline PointSet point_set(const MetricSpace<Rational>& s, const json& ids, const std::string& where)
{
    if (!ids.is_array()) throw MalformedInput(where + ": expected an array of point ids");
    PointSet out;
    for (const auto& id : ids) {
        auto name = as_string(id, where);
        try {
            out.push_back(s.index_of(name));
        } catch (const PreconditionError&) {
            throw MalformedInput(where + ": unknown point '" + name + "'");
        }
    }
    return out;
}

/// {"points":[ids], "metric":{"kind":"matrix","d":[[...]]} | {"kind":"graph","edges":[[i,j,w]...]},
///  "filtration":[[ids]...]}; graph endpoints are indices or ids.
inline SpacePtr<Rational> space_from_json(const json& j)
{
    const std::string where = "space";
    std::vector<std::string> ids;
    for (const auto& p : array_field(j, "points", where)) ids.push_back(as_string(p, where + ".points"));
    if (ids.empty()) throw MalformedInput("space: no points");
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (!index.emplace(ids[i], i).second) throw MalformedInput("space: duplicate point id '" + ids[i] + "'");
    const auto& metric = field(j, "metric", where);
    auto kind = as_string(field(metric, "kind", "space.metric"), "space.metric.kind");
    SpacePtr<Rational> s;
    if (kind == "matrix") {
        const auto& d = array_field(metric, "d", "space.metric");
        if (d.size() != ids.size()) throw MalformedInput("space.metric.d: expected " + std::to_string(ids.size()) + " rows");
        std::vector<Rational> m;
        for (const auto& row : d) {
            if (!row.is_array() || row.size() != ids.size()) throw MalformedInput("space.metric.d: ragged matrix");
            for (const auto& v : row) m.push_back(as_rational(v, "space.metric.d"));
        }
        s = make_space(ids, std::move(m));
    } else if (kind == "graph") {
        std::vector<std::tuple<std::size_t, std::size_t, Rational>> edges;
        auto endpoint = [&](const json& e) -> std::size_t {
            if (e.is_number_integer()) {
                auto i = e.get<long long>();
                if (i < 0 || static_cast<std::size_t>(i) >= ids.size()) throw MalformedInput("space.metric.edges: index out of range");
                return static_cast<std::size_t>(i);
            }
            auto it = index.find(as_string(e, "space.metric.edges"));
            if (it == index.end()) throw MalformedInput("space.metric.edges: unknown point '" + e.get<std::string>() + "'");
            return it->second;
        };
        for (const auto& e : array_field(metric, "edges", "space.metric")) {
            if (!e.is_array() || e.size() != 3) throw MalformedInput("space.metric.edges: each edge is [i, j, w]");
            edges.emplace_back(endpoint(e[0]), endpoint(e[1]), as_rational(e[2], "space.metric.edges"));
        }
        s = make_graph_space(ids, edges);
    } else {
        throw MalformedInput("space.metric.kind must be \"matrix\" or \"graph\"");
    }
    if (j.contains("filtration")) {
        std::vector<PointSet> filt;
        if (!j["filtration"].is_array()) throw MalformedInput("space.filtration must be an array");
        for (const auto& k : j["filtration"]) filt.push_back(point_set(*s, k, "space.filtration"));
        std::vector<Rational> m;
        for (PointId a = 0; a < s->size(); ++a)
            for (PointId b = 0; b < s->size(); ++b) m.push_back(s->distance(a, b));
        s = std::make_shared<const FilteredMetricSpace>(s->ids(), std::move(m), std::move(filt),
                                                        FilteredMetricSpace::Validation::trusted);
    }
    return s;
}

inline Cover<Rational> cover_from_json(const SpacePtr<Rational>& s, const json& j)
{
    std::vector<PointSet> members;
    for (const auto& m : array_field(j, "members", "cover")) members.push_back(point_set(*s, m, "cover.members"));
    return Cover<Rational>(s, std::move(members));
}

inline json cover_to_json(const Cover<Rational>& c)
{
    json members = json::array();
    for (const auto& m : c.members()) {
        json ids = json::array();
        for (auto p : m) ids.push_back(c.space().id(p));
        members.push_back(ids);
    }
    return json{{"members", members}};
}

// ---------------------------------------------------------------------------
// Complexes
// ---------------------------------------------------------------------------

/// {"vertices":[labels], "maximal_simplices":[[labels]...]}
inline ComplexPtr complex_from_json(const json& j)
{
    std::vector<std::string> labels;
    for (const auto& v : array_field(j, "vertices", "complex")) labels.push_back(as_string(v, "complex.vertices"));
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!index.emplace(labels[i], i).second) throw MalformedInput("complex: duplicate vertex '" + labels[i] + "'");
    std::vector<Simplex> gens;
    for (const auto& s : array_field(j, "maximal_simplices", "complex")) {
        if (!s.is_array()) throw MalformedInput("complex.maximal_simplices: each simplex is an array of labels");
        Simplex g;
        for (const auto& v : s) {
            auto it = index.find(as_string(v, "complex.maximal_simplices"));
            if (it == index.end()) throw MalformedInput("complex: unknown vertex '" + v.get<std::string>() + "'");
            g.push_back(it->second);
        }
        gens.push_back(std::move(g));
    }
    return SimplicialComplex::from_generators(std::move(labels), gens);
}

inline json simplex_labels(const SimplicialComplex& k, const Simplex& s)
{
    json out = json::array();
    for (auto v : s) out.push_back(k.label(v));
    return out;
}

inline json complex_to_json(const SimplicialComplex& k)
{
    json tops = json::array();
    for (auto i : k.maximal_simplices()) tops.push_back(simplex_labels(k, k.simplex(i)));
    return json{{"vertices", k.labels()}, {"maximal_simplices", tops}};
}

inline json maximal_simplices_of(const Subcomplex& s)
{
    const auto& k = *s.ambient();
    auto tops = Subcomplex(s).simplex_indices();
    json out = json::array();
    for (auto i : tops) {
        const auto& si = k.simplex(i);
        bool maximal = true;
        for (auto j : tops)
            if (j != i && k.simplex(j).size() > si.size() && is_face(si, k.simplex(j))) {
                maximal = false;
                break;
            }
        if (maximal) out.push_back(simplex_labels(k, si));
    }
    return out;
}

inline json simplicial_map_to_json(const SimplicialMap& f)
{
    json m = json::object();
    for (std::size_t v = 0; v < f.vertex_map.size(); ++v) m[f.source->label(v)] = f.target->label(f.vertex_map[v]);
    return json{{"vertex_map", m}};
}

inline SimplicialMap simplicial_map_from_json(const json& j, ComplexPtr source, ComplexPtr target)
{
    const auto& m = field(j, "vertex_map", "connecting map");
    if (!m.is_object()) throw MalformedInput("connecting map: vertex_map must be an object");
    SimplicialMap f{source, target, std::vector<std::size_t>(source->vertex_count(), 0)};
    std::vector<char> seen(source->vertex_count(), 0);
    for (const auto& [from, to] : m.items()) {
        std::size_t a, b;
        try {
            a = source->vertex_index(from);
            b = target->vertex_index(as_string(to, "vertex_map"));
        } catch (const PreconditionError& e) {
            throw MalformedInput(std::string("connecting map: ") + e.what());
        }
        f.vertex_map[a] = b;
        seen[a] = 1;
    }
    for (std::size_t v = 0; v < seen.size(); ++v)
        if (!seen[v]) throw MalformedInput("connecting map: vertex '" + source->label(v) + "' has no image");
    return f;
}

// ---------------------------------------------------------------------------
// Coarsening spaces
// ---------------------------------------------------------------------------

inline json coarsening_to_json(const CoarseningSpace& x)
{
    json levels = json::array();
    for (std::size_t i = 1; i <= x.level_count(); ++i)
        levels.push_back(json{{"level", i}, {"complex", complex_to_json(*x.nerve_at(i))}});
    json maps = json::array();
    for (const auto& f : x.connecting_maps()) maps.push_back(simplicial_map_to_json(f));
    json nodes = json::array();
    for (NodeId n = 0; n < x.node_count(); ++n) nodes.push_back(json{{"label", x.label(n)}, {"level", x.level_of(n)}});
    json edges = json::array();
    for (const auto& e : x.edges())
        edges.push_back(json{{"a", e.a}, {"b", e.b}, {"kind", e.kind == EdgeKind::horizontal ? "horizontal" : "vertical"},
                             {"length", to_json(e.length)}});
    return json{{"depth", x.depth()}, {"levels", levels}, {"connecting_maps", maps}, {"nodes", nodes}, {"edges", edges}};
}

/// Rebuilds from levels, connecting maps and depth; node and edge lists are derived data.
inline CoarseningSpace coarsening_from_json(const json& j)
{
    long depth = as_long(field(j, "depth", "coarsening"), "coarsening.depth");
    std::vector<ComplexPtr> nerves;
    for (const auto& lv : array_field(j, "levels", "coarsening")) nerves.push_back(complex_from_json(field(lv, "complex", "coarsening.levels")));
    const auto& maps = array_field(j, "connecting_maps", "coarsening");
    if (nerves.empty() || maps.size() + 1 != nerves.size())
        throw MalformedInput("coarsening: need one connecting map per consecutive level pair");
    std::vector<SimplicialMap> conn;
    for (std::size_t i = 0; i < maps.size(); ++i) conn.push_back(simplicial_map_from_json(maps[i], nerves[i], nerves[i + 1]));
    return CoarseningSpace(std::move(nerves), std::move(conn), static_cast<int>(depth));
}

// ---------------------------------------------------------------------------
// Entourages and groups
// ---------------------------------------------------------------------------

inline Entourage<Rational> entourage_from_json(const SpacePtr<Rational>& s, const json& j)
{
    std::vector<PointPair> pairs;
    for (const auto& p : array_field(j, "pairs", "entourage")) {
        if (!p.is_array() || p.size() != 2) throw MalformedInput("entourage.pairs: each pair is [id, id]");
        auto ps = point_set(*s, p, "entourage.pairs");
        pairs.emplace_back(ps[0], ps[1]);
    }
    return Entourage<Rational>(s, std::move(pairs));
}

inline json hom_to_json(const GroupHom& h)
{
    json m = json::array();
    for (const auto& row : h.matrix) {
        json r = json::array();
        for (const auto& a : row) r.push_back(to_json(a));
        m.push_back(r);
    }
    return json{{"source", h.source.labels}, {"target", h.target.labels}, {"matrix", m}};
}

inline json invariants_to_json(const AbelianInvariants& a)
{
    json t = json::array();
    for (const auto& d : a.torsion) t.push_back(to_json(d));
    return json{{"free_rank", a.free_rank}, {"torsion", t}, {"group", a.to_string()}};
}

// ---------------------------------------------------------------------------
// Decomposition trees
// ---------------------------------------------------------------------------

inline json tree_to_json(const DecompositionTree& t, std::size_t node)
{
    const auto& n = t.nodes.at(node);
    json children = json::array();
    for (auto c : n.children) children.push_back(tree_to_json(t, c));
    return json{{"name", n.name}, {"label", maximal_simplices_of(n.label)}, {"children", children}};
}

inline json tree_to_json(const DecompositionTree& t) { return tree_to_json(t, t.root); }

}  // namespace coarsekit::io
