#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <openssl/evp.h>

#include <CLI11.hpp>

#include "json_io.hpp"

using namespace coarsekit;
using coarsekit::io::json;

namespace {

constexpr const char* tool_version = "coarsekit 1.0.0";

std::string sha256_of_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedInput("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr)) throw Error("sha256 failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

struct Run {
    std::string command;
    std::vector<std::string> inputs;
    json options = json::object();
    std::string out;
    unsigned long seed = 0;

    json manifest() const
    {
        json in = json::array();
        for (const auto& p : inputs) in.push_back(json{{"path", p}, {"sha256", sha256_of_file(p)}});
        json outputs = json::array();
        if (!out.empty()) outputs.push_back(out);
        return json{{"command", command}, {"tool_version", tool_version}, {"seed", seed},
                    {"inputs", in},       {"options", options},         {"outputs", outputs}};
    }

    void emit(json result) const
    {
        result["manifest"] = manifest();
        const std::string text = result.dump(2) + "\n";
        if (out.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(out, std::ios::binary);
        if (!f) throw PreconditionError("cannot write '" + out + "'");
        f << text;
    }
};

json lengths(const std::vector<Rational>& v)
{
    json a = json::array();
    for (const auto& r : v) a.push_back(io::to_json(r));
    return a;
}

// ---------------------------------------------------------------------------

json cmd_nerve(const std::string& space_path, const std::string& cover_path)
{
    auto s = io::space_from_json(io::read_json_file(space_path));
    auto c = io::cover_from_json(s, io::read_json_file(cover_path));
    auto k = nerve(c);
    json f = json::array();
    for (int d = 0; d <= k->dimension(); ++d) f.push_back(k->count_of_dimension(d));
    auto deg = degree(c);
    return json{{"complex", io::complex_to_json(*k)},
                {"stats",
                 {{"dimension", k->dimension()},
                  {"f_vector", f},
                  {"cover_degree", deg.value},
                  {"cover_degree_point", s->id(deg.point)}}}};
}

json certificate_json(const AntiCechSequence<Rational>& seq)
{
    json cert = json::array();
    for (const auto& c : seq.certificate)
        cert.push_back(json{{"step", c.step},
                            {"diameter", io::to_json(c.diameter)},
                            {"lebesgue_lower_bound", io::to_json(c.lebesgue)},
                            {"holds", c.holds}});
    return cert;
}

json cmd_anticech(const SpacePtr<Rational>& s, const std::vector<Rational>& schedule, std::size_t retries)
{
    auto seq = build_anticech(s, schedule, retries);
    json covers = json::array();
    for (std::size_t i = 0; i < seq.covers.size(); ++i) {
        auto c = io::cover_to_json(seq.covers[i]);
        c["radius"] = io::to_json(seq.radii[i]);
        c["diameter"] = io::to_json(cover_diameter(seq.covers[i]));
        covers.push_back(c);
    }
    return json{{"covers", covers},
                {"requested_radii", lengths(seq.requested_radii)},
                {"radii", lengths(seq.radii)},
                {"retries", seq.retries},
                {"certificate", certificate_json(seq)}};
}

json cmd_coarsen(const SpacePtr<Rational>& s, const std::vector<Rational>& schedule, int depth, std::size_t retries)
{
    auto seq = build_anticech(s, schedule, retries);
    auto x = build_coarsening(seq, depth);
    json out = io::coarsening_to_json(x);
    out["certificate"] = certificate_json(seq);
    out["radii"] = lengths(seq.radii);
    return out;
}

NodeId parse_node(const CoarseningSpace& x, const std::string& text)
{
    for (NodeId n = 0; n < x.node_count(); ++n)
        if (x.label(n) == text) return n;
    try {
        std::size_t pos = 0;
        unsigned long v = std::stoul(text, &pos);
        if (pos == text.size() && v < x.node_count()) return v;
    } catch (const std::exception&) {
    }
    throw PreconditionError("unknown base node '" + text + "'");
}

json cmd_check_swindle(const std::string& path, const std::string& basepoint, std::size_t kmax,
                       const std::vector<Rational>& radii)
{
    auto x = io::coarsening_from_json(io::read_json_file(path));
    NodeId x0 = parse_node(x, basepoint);
    auto maps = swindle_sequence(x, x0, kmax);
    std::vector<SphericalLength> rs;
    for (const auto& r : radii) rs.push_back(SphericalLength::linear(r));
    auto rep = check_swindle_hypotheses(x, maps, x0, rs);
    json escape = json::array();
    for (const auto& e : rep.escape)
        escape.push_back(json{{"radius", io::to_json(e.radius)}, {"escape_index", e.escape_index}, {"escaped", e.escaped}});
    json control = json::array();
    for (const auto& c : rep.control) control.push_back(json{{"radius", io::to_json(c.radius)}, {"bound", io::to_json(c.bound)}});
    bool increasing = true;
    for (std::size_t i = 1; i < rep.escape.size(); ++i)
        increasing = increasing && rep.escape[i - 1].escape_index < rep.escape[i].escape_index;
    return json{{"basepoint", x.label(x0)},
                {"kmax", kmax},
                {"escape", escape},
                {"control", control},
                {"control_finite", rep.control_finite},
                {"step_bound", io::to_json(rep.step_bound)},
                {"step_finite", rep.step_finite},
                {"step_witness", {{"k", rep.step_k}, {"node", x.label(rep.step_node)}}},
                {"certificate",
                 {{"escape_strictly_increasing", increasing},
                  {"all_escaped", std::all_of(rep.escape.begin(), rep.escape.end(), [](const auto& e) { return e.escaped; })},
                  {"control_finite", rep.control_finite},
                  {"step_finite", rep.step_finite}}}};
}

json c0_json(const MetricSpace<Rational>& s, const C0Report<Rational>& r)
{
    json j{{"pass", r.pass}, {"profile", lengths(r.profile)}};
    if (r.first_violation) j["first_violation"] = *r.first_violation;
    if (r.witness) j["witness"] = json::array({s.id(r.witness->first), s.id(r.witness->second)});
    return j;
}

json cmd_classify(const SpacePtr<Rational>& s, const json& ent, const std::vector<Rational>& tolerance,
                  const std::vector<Rational>& level_tolerance)
{
    auto e = io::entourage_from_json(s, ent);
    json out;
    json profile = json::array();
    for (const auto& w : control_profile(e)) profile.push_back(io::to_json(w.value));
    out["control_profile"] = profile;
    out["bounded"] = io::to_json(bounded_bound(e));
    out["c0"] = c0_json(*s, classify_c0(e, tolerance));
    if (ent.contains("levels")) {
        const auto& lj = ent["levels"];
        if (!lj.is_object()) throw MalformedInput("entourage.levels must map point ids to levels");
        Levels lv{std::vector<std::size_t>(s->size(), 0)};
        for (const auto& [id, l] : lj.items()) {
            long v = io::as_long(l, "entourage.levels");
            if (v < 1) throw MalformedInput("entourage.levels: levels start at 1");
            try {
                lv.level[s->index_of(id)] = static_cast<std::size_t>(v);
            } catch (const PreconditionError&) {
                throw MalformedInput("entourage.levels: unknown point '" + id + "'");
            }
        }
        auto fusion = classify_fusion(e, lv, tolerance);
        json attempts = json::array();
        for (const auto& a : fusion.attempts) attempts.push_back(c0_json(*s, a));
        out["fusion"] = json{{"pass", fusion.pass}, {"bounded", io::to_json(fusion.bounded)}, {"attempts", attempts}};
        if (fusion.cut) out["fusion"]["cut"] = *fusion.cut;
        if (!level_tolerance.empty()) {
            auto hybrid = classify_hybrid(e, lv, level_tolerance);
            out["hybrid"] = json{{"pass", hybrid.pass}, {"sup_by_level", lengths(hybrid.sup_by_level)}};
            if (hybrid.start) out["hybrid"]["start"] = *hybrid.start;
            if (hybrid.last_violation) out["hybrid"]["last_violation"] = *hybrid.last_violation;
        }
    }
    return out;
}

json subgroup_json(const SubgroupBasis& s)
{
    json rows = json::array();
    for (const auto& r : s.basis()) {
        json row = json::array();
        for (const auto& a : r) row.push_back(io::to_json(a));
        rows.push_back(row);
    }
    return json{{"rank", s.rank()}, {"hnf_basis", rows}};
}

json cmd_kpipeline(const std::vector<std::string>& points, const std::vector<std::vector<std::string>>& chain)
{
    auto r = c0_k_report(points, chain);
    json stages = json::array();
    for (const auto& st : r.stages)
        stages.push_back(json{{"from", st.from},
                              {"to", st.to},
                              {"map", io::hom_to_json(st.map)},
                              {"surjective", st.check.surjective},
                              {"kernel_matches", st.check.kernel_matches}});
    bool all_surjective = std::all_of(r.stages.begin(), r.stages.end(), [](const auto& s) { return s.check.surjective; });
    return json{{"points", points},
                {"chain", chain},
                {"stages", stages},
                {"kernel_collapse", subgroup_json(r.kernel_collapse)},
                {"kernel_block", subgroup_json(r.kernel_block)},
                {"quotient_collapse", io::invariants_to_json(r.quotient_collapse)},
                {"quotient_block", io::invariants_to_json(r.quotient_block)},
                {"expected", io::invariants_to_json(r.expected)},
                {"odd", io::invariants_to_json(r.odd)},
                {"certificate",
                 {{"all_stages_surjective", all_surjective},
                  {"composite_consistent", r.composite_consistent},
                  {"collapse_matches_description", r.collapse_matches_description},
                  {"kernels_equal", r.kernels_equal},
                  {"quotient_matches", r.quotient_matches}}}};
}

json distortion_json(const TreeNode& n, const std::optional<DistortionReport>& d)
{
    if (!d) return nullptr;
    if (d->infinite) return json{{"infinite", true}};
    const auto& k = *n.label.ambient();
    return json{{"value", io::to_json(d->value)}, {"witness", json::array({k.label(d->witness.first), k.label(d->witness.second)})}};
}

json node_report(const DecompositionTree& t, const AdmissibilityReport& rep, std::size_t i)
{
    const auto& n = t.nodes[i];
    json j{{"name", n.name}};
    if (const auto* f = rep.fork(i)) {
        json rows = json::array();
        for (const auto& r : f->excisive) rows.push_back(json{{"radius", r.radius}, {"ok", r.ok}, {"minimal", r.minimal}});
        j["kind"] = "fork";
        j["excisive"] = rows;
        j["excisive_ok"] = f->excisive_ok;
        j["relatively_connected"] = {{"first", f->first_relatively_connected},
                                     {"second", f->second_relatively_connected},
                                     {"meet", f->meet_relatively_connected}};
        j["distortion"] = {{"first", distortion_json(t.nodes[n.children[0]], f->first_distortion)},
                           {"second", distortion_json(t.nodes[n.children[1]], f->second_distortion)},
                           {"meet", distortion_json(n, f->meet_distortion)}};
        j["meet_dimension"] = f->meet_dimension;
        json children = json::array();
        for (auto c : n.children) children.push_back(node_report(t, rep, c));
        j["children"] = children;
    } else if (const auto* l = rep.leaf(i)) {
        j["kind"] = "leaf";
        j["classification"] = l->kind == LeafKind::finite ? "finite" : "separated_family";
        j["members"] = l->members;
        j["separation"] = io::to_json(l->separation);
        j["children"] = json::array();
    }
    return j;
}

json cmd_decompose(const std::string& path, const std::vector<long>& scales)
{
    auto k = io::complex_from_json(io::read_json_file(path));
    auto d = build_canonical_tree(k);
    auto rep = admissibility_report(d.tree, scales);
    json meets = json::array();
    for (std::size_t lv = 1; lv < d.levels.size(); ++lv)
        meets.push_back(json{{"level", lv}, {"dimension", (d.accumulated[lv - 1] & d.levels[lv].with_skeleton).dimension()}});
    return json{{"base_dimension", k->dimension()},
                {"refined_complex", {{"vertices", d.complex()->vertex_count()}, {"simplices", d.complex()->simplex_count()}}},
                {"tree", io::tree_to_json(d.tree)},
                {"labels_verified", rep.labels.ok},
                {"accumulated_meets", meets},
                {"report", node_report(d.tree, rep, d.tree.root)}};
}

std::vector<long> parse_long_list(const std::string& text)
{
    std::vector<long> out;
    for (const auto& r : io::parse_rational_list(text)) {
        if (r.get_den() != 1 || !r.get_num().fits_slong_p()) throw MalformedInput("scales must be integers (hops)");
        out.push_back(r.get_num().get_si());
    }
    return out;
}

int threads_cap()
{
    const char* env = std::getenv("COARSEKIT_THREADS");
    if (!env) return 1;
    try {
        int v = std::stoi(env);
        if (v < 1) throw MalformedInput("COARSEKIT_THREADS must be a positive integer");
        return v;
    } catch (const std::logic_error&) {
        throw MalformedInput("COARSEKIT_THREADS must be a positive integer");
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite models of coarse geometry constructions"};
    app.require_subcommand(1);
    Run run;
    std::string space, cover, schedule, complex_path, coarsening, basepoint, radii = "1,2,3", tolerance, level_tolerance,
        entourage, points, chain, scales = "1,2,4";
    int depth = 1;
    std::size_t kmax = 1000, retries = 8;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", run.out, "Write the report here instead of stdout");
        sub->add_option("--seed", run.seed, "Recorded in the manifest; every command is deterministic");
    };

    auto* nerve_cmd = app.add_subcommand("nerve", "Nerve of a cover");
    nerve_cmd->add_option("--space", space)->required();
    nerve_cmd->add_option("--cover", cover)->required();
    common(nerve_cmd);

    auto* anticech_cmd = app.add_subcommand("anticech", "Certified anti-Cech sequence");
    anticech_cmd->add_option("--space", space)->required();
    anticech_cmd->add_option("--schedule", schedule, "Increasing radii, comma separated")->required();
    anticech_cmd->add_option("--max-retries", retries);
    common(anticech_cmd);

    auto* coarsen_cmd = app.add_subcommand("coarsen", "Coarsening space of an anti-Cech sequence");
    coarsen_cmd->add_option("--space", space)->required();
    coarsen_cmd->add_option("--schedule", schedule)->required();
    coarsen_cmd->add_option("--depth", depth);
    coarsen_cmd->add_option("--max-retries", retries);
    common(coarsen_cmd);

    auto* swindle_cmd = app.add_subcommand("check-swindle", "Swindle hypotheses on a coarsening space");
    swindle_cmd->add_option("--coarsening", coarsening)->required();
    swindle_cmd->add_option("--basepoint", basepoint, "Node label or index")->required();
    swindle_cmd->add_option("--kmax", kmax);
    swindle_cmd->add_option("--radii", radii, "Test-ball radii");
    common(swindle_cmd);

    auto* classify_cmd = app.add_subcommand("classify", "C0, fusion and hybrid classifiers for an entourage");
    classify_cmd->add_option("--space", space)->required();
    classify_cmd->add_option("--entourage", entourage)->required();
    classify_cmd->add_option("--tolerance", tolerance, "One tolerance per filtration set")->required();
    classify_cmd->add_option("--level-tolerance", level_tolerance, "One tolerance per level");
    common(classify_cmd);

    auto* k_cmd = app.add_subcommand("kpipeline", "K-group pipeline for a chain of compact sets");
    k_cmd->add_option("--points", points, "Comma separated point labels")->required();
    k_cmd->add_option("--chain", chain, "Sets separated by ';', points by ','")->required();
    common(k_cmd);

    auto* dec_cmd = app.add_subcommand("decompose", "Canonical decomposition tree and admissibility report");
    dec_cmd->add_option("--complex", complex_path)->required();
    dec_cmd->add_option("--scales", scales, "Excisiveness scales in hops");
    common(dec_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        run.options["threads"] = threads_cap();
        json result;
        if (*nerve_cmd) {
            run.command = "nerve";
            run.inputs = {space, cover};
            result = cmd_nerve(space, cover);
        } else if (*anticech_cmd) {
            run.command = "anticech";
            run.inputs = {space};
            run.options["schedule"] = schedule;
            run.options["max_retries"] = retries;
            result = cmd_anticech(io::space_from_json(io::read_json_file(space)), io::parse_rational_list(schedule), retries);
        } else if (*coarsen_cmd) {
            run.command = "coarsen";
            run.inputs = {space};
            run.options["schedule"] = schedule;
            run.options["depth"] = depth;
            run.options["max_retries"] = retries;
            result = cmd_coarsen(io::space_from_json(io::read_json_file(space)), io::parse_rational_list(schedule), depth, retries);
        } else if (*swindle_cmd) {
            run.command = "check-swindle";
            run.inputs = {coarsening};
            run.options["basepoint"] = basepoint;
            run.options["kmax"] = kmax;
            run.options["radii"] = radii;
            result = cmd_check_swindle(coarsening, basepoint, kmax, io::parse_rational_list(radii));
        } else if (*classify_cmd) {
            run.command = "classify";
            run.inputs = {space, entourage};
            run.options["tolerance"] = tolerance;
            run.options["level_tolerance"] = level_tolerance;
            result = cmd_classify(io::space_from_json(io::read_json_file(space)), io::read_json_file(entourage),
                                  io::parse_rational_list(tolerance),
                                  level_tolerance.empty() ? std::vector<Rational>{} : io::parse_rational_list(level_tolerance));
        } else if (*k_cmd) {
            run.command = "kpipeline";
            run.options["points"] = points;
            run.options["chain"] = chain;
            std::vector<std::vector<std::string>> sets;
            for (const auto& s : io::split(chain, ';')) sets.push_back(io::split(s, ','));
            result = cmd_kpipeline(io::split(points, ','), sets);
        } else if (*dec_cmd) {
            run.command = "decompose";
            run.inputs = {complex_path};
            run.options["scales"] = scales;
            result = cmd_decompose(complex_path, parse_long_list(scales));
        }
        run.emit(std::move(result));
        return 0;
    } catch (const Error& e) {
        std::cerr << json{{"error", {{"kind", e.kind()}, {"message", e.what()}, {"exit_code", e.exit_code()}}}}.dump() << "\n";
        return e.exit_code();
    } catch (const json::exception& e) {
        std::cerr << json{{"error", {{"kind", "malformed_input"}, {"message", e.what()}, {"exit_code", 2}}}}.dump() << "\n";
        return 2;
    }
}
