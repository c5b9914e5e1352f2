#ifndef FOCKLIFT_JSON_IO_HPP
#define FOCKLIFT_JSON_IO_HPP

// JSON encodings.  Matrices are nested row-major arrays whose entries are
// [re, im] pairs; plain numbers are accepted on input as real entries.

#include <string>
#include <vector>

#include <json.hpp>

#include "focklift/dilation.hpp"
#include "focklift/fock.hpp"
#include "focklift/interpolation.hpp"
#include "focklift/multianalytic.hpp"

namespace focklift::io {

using json = nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from_json(const json& j, const std::string& where)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw InvalidInput(where + ": expected a number or a [re, im] pair");
}

inline json to_json(const Matrix& m)
{
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c)
            row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j, const std::string& where)
{
    if (!j.is_array())
        throw InvalidInput(where + ": matrix must be an array of rows");
    if (j.empty())
        return Matrix(0, 0);
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw InvalidInput(where + ": rows must be arrays of equal length");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Index>(r), static_cast<Index>(c)) =
                cplx_from_json(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

inline const json& field(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        throw InvalidInput(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline int int_field(const json& j, const char* key, const std::string& where)
{
    const json& v = field(j, key, where);
    if (!v.is_number_integer())
        throw InvalidInput(where + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

inline int int_field(const json& j, const char* key, const std::string& where, int fallback)
{
    return j.contains(key) ? int_field(j, key, where) : fallback;
}

inline RowTuple tuple_from_json(const json& j, const std::string& where)
{
    if (!j.is_array() || j.empty())
        throw InvalidInput(where + ": tuple must be a nonempty array of matrices");
    RowTuple T;
    for (std::size_t i = 0; i < j.size(); ++i)
        T.push_back(matrix_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    check_tuple(T);
    return T;
}

inline json to_json(const RowTuple& T)
{
    json a = json::array();
    for (const auto& m : T)
        a.push_back(to_json(m));
    return a;
}

// words

inline json to_json(const Word& w) { return json(w.letters()); }

inline Word word_from_json(const json& j, const std::string& where)
{
    if (!j.is_array())
        throw InvalidInput(where + ": word must be an array of letters");
    std::vector<int> letters;
    for (const auto& l : j) {
        if (!l.is_number_integer())
            throw InvalidInput(where + ": letters must be integers");
        letters.push_back(l.get<int>());
    }
    return Word(std::move(letters));
}

// TruncOp

inline json to_json(const TruncOp& op)
{
    return {{"n", op.n},
            {"in_degree", op.in_degree},
            {"out_degree", op.out_degree},
            {"in_factor", op.in_factor},
            {"out_factor", op.out_factor},
            {"matrix", to_json(op.matrix)}};
}

inline TruncOp truncop_from_json(const json& j, const std::string& where)
{
    TruncOp op;
    op.n = int_field(j, "n", where);
    op.in_degree = int_field(j, "in_degree", where);
    op.out_degree = int_field(j, "out_degree", where);
    op.in_factor = int_field(j, "in_factor", where, 1);
    op.out_factor = int_field(j, "out_factor", where, 1);
    detail::check_nd(op.n, op.in_degree);
    detail::check_nd(op.n, op.out_degree);
    op.matrix = matrix_from_json(field(j, "matrix", where), where + ".matrix");
    op.validate();
    return op;
}

// Symbol: {n, blocks:[{word, value}], tail_norm?, cutoff?}

inline json to_json(const Symbol& s)
{
    json blocks = json::array();
    for (const auto& [w, m] : s.coeff)
        blocks.push_back({{"word", to_json(w)}, {"value", to_json(m)}});
    json j = {{"n", s.n}, {"rows", s.rows}, {"cols", s.cols}, {"blocks", blocks}};
    if (s.tail_norm) {
        j["tail_norm"] = *s.tail_norm;
        j["cutoff"] = s.cutoff;
    }
    return j;
}

inline Symbol symbol_from_json(const json& j, const std::string& where)
{
    const int n = int_field(j, "n", where);
    if (n < 1)
        throw InvalidInput(where + ": n must be >= 1");
    const json& blocks = field(j, "blocks", where);
    if (!blocks.is_array())
        throw InvalidInput(where + ".blocks must be an array");
    std::vector<std::pair<Word, Matrix>> entries;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const std::string tag = where + ".blocks[" + std::to_string(b) + "]";
        entries.emplace_back(word_from_json(field(blocks[b], "word", tag), tag + ".word"),
                             matrix_from_json(field(blocks[b], "value", tag), tag + ".value"));
    }
    Index rows = j.contains("rows") ? int_field(j, "rows", where) : (entries.empty() ? 1 : entries[0].second.rows());
    Index cols = j.contains("cols") ? int_field(j, "cols", where) : (entries.empty() ? 1 : entries[0].second.cols());
    Symbol s(n, rows, cols);
    for (auto& [w, m] : entries)
        s.set(w, m);
    if (j.contains("tail_norm")) {
        if (!j["tail_norm"].is_number())
            throw InvalidInput(where + ".tail_norm must be a number");
        s.tail_norm = j["tail_norm"].get<double>();
        s.cutoff = int_field(j, "cutoff", where, s.degree());
    }
    s.validate();
    return s;
}

// NPData: {k, nodes:[{Z, B, C}]} or {k, points, values}

inline std::vector<std::vector<cplx>> points_from_json(const json& j, const std::string& where)
{
    if (!j.is_array())
        throw InvalidInput(where + ": points must be an array");
    std::vector<std::vector<cplx>> pts;
    for (std::size_t p = 0; p < j.size(); ++p) {
        if (!j[p].is_array())
            throw InvalidInput(where + "[" + std::to_string(p) + "]: a point is an array of coordinates");
        std::vector<cplx> z;
        for (std::size_t c = 0; c < j[p].size(); ++c)
            z.push_back(cplx_from_json(j[p][c], where + "[" + std::to_string(p) + "][" + std::to_string(c) + "]"));
        pts.push_back(std::move(z));
    }
    return pts;
}

inline std::vector<cplx> values_from_json(const json& j, const std::string& where)
{
    if (!j.is_array())
        throw InvalidInput(where + ": values must be an array");
    std::vector<cplx> v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(cplx_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

inline bool is_scalar_np(const json& j) { return j.is_object() && j.contains("points"); }

inline NPData npdata_from_json(const json& j, const std::string& where = "np")
{
    const int k = int_field(j, "k", where);
    if (is_scalar_np(j))
        return scalar_np_data(points_from_json(j["points"], where + ".points"),
                              values_from_json(field(j, "values", where), where + ".values"), k);
    const json& nodes = field(j, "nodes", where);
    if (!nodes.is_array())
        throw InvalidInput(where + ".nodes must be an array");
    NPData d;
    d.k = k;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        const std::string tag = where + ".nodes[" + std::to_string(q) + "]";
        NPNode nd;
        nd.Z = tuple_from_json(field(nodes[q], "Z", tag), tag + ".Z");
        nd.B = matrix_from_json(field(nodes[q], "B", tag), tag + ".B");
        nd.C = matrix_from_json(field(nodes[q], "C", tag), tag + ".C");
        d.nodes.push_back(std::move(nd));
    }
    d.validate();
    return d;
}

// reports

inline json to_json(const VerificationReport& rep)
{
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"bound", c.bound}});
    return {{"all_pass", rep.all_pass},
            {"dense", rep.dense},
            {"max_residual", rep.max_residual},
            {"max_pair_residual", rep.max_pair_residual},
            {"ratio", rep.ratio},
            {"degenerate", rep.degenerate},
            {"checks", checks}};
}

inline json to_json(const LiftResult& r, bool include_B = true)
{
    json j = {{"gamma", r.gamma},
              {"rhs", r.rhs},
              {"residuals", r.residuals},
              {"pair_residuals", r.pair_residuals},
              {"tail_bound", r.tail_bound},
              {"norm_B", r.norm_B},
              {"norm_B_upper", r.norm_interval_hi()},
              {"scale", r.scale},
              {"normalized", r.normalized},
              {"exact_regime", r.exact_regime},
              {"lambda_certificate", r.lambda_certificate},
              {"douglas_residual", r.douglas_residual},
              {"douglas_clipped", r.douglas_clipped},
              {"dilation", {{"n", r.dilation.n}, {"degree", r.dilation.degree}, {"h", r.dilation.h},
                            {"defect_dim", r.dilation.d}, {"dim", r.dilation.dim()}}}};
    // B maps X into H (+) F^2_{<=D} (x) D_T; the Fock part is the TruncOp
    if (include_B && r.B) {
        const auto& dil = r.dilation;
        TruncOp fock{dil.n, 0, dil.degree, r.A.cols(), std::max<Index>(dil.d, 1), Matrix()};
        j["B"] = {{"rows", r.B->rows()}, {"cols", r.B->cols()}, {"top", to_json(Matrix(r.B->topRows(dil.h)))}};
        if (dil.d > 0) {
            fock.matrix = r.B->bottomRows(r.B->rows() - dil.h);
            j["B"]["fock"] = to_json(fock);
        }
    } else {
        j["B"] = nullptr;
    }
    return j;
}

inline json to_json(const NPFeasibility& f)
{
    return {{"feasible", f.feasible},
            {"marginal", f.marginal},
            {"min_eig", f.min_eig},
            {"threshold", f.threshold},
            {"lyapunov_residual", f.lyapunov_residual}};
}

} // namespace focklift::io

#endif // FOCKLIFT_JSON_IO_HPP
