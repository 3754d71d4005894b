#include "cbicl/instance_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cbicl {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

// token reader over the whole text; the formats are whitespace-separated
class TokenStream {
public:
    explicit TokenStream(const std::string& text) : in_(text) {}

    std::string next(const char* what) {
        if (!pending_.empty()) {
            std::string tok = std::move(pending_);
            pending_.clear();
            return tok;
        }
        std::string tok;
        if (!(in_ >> tok)) throw ParseError(std::string("unexpected end of input, expected ") + what);
        return tok;
    }

    int next_int(const char* what) {
        std::string tok = next(what);
        try {
            size_t pos = 0;
            int v = std::stoi(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw ParseError(std::string("expected integer for ") + what + ", got '" + tok + "'");
        }
    }

    double next_double(const char* what) {
        std::string tok = next(what);
        try {
            size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw ParseError(std::string("expected decimal for ") + what + ", got '" + tok + "'");
        }
    }

    bool at_end() {
        if (!pending_.empty()) return false;
        std::string tok;
        if (!(in_ >> tok)) return true;
        pending_ = std::move(tok);
        return false;
    }

private:
    std::istringstream in_;
    std::string pending_;
};

void read_pair_block(TokenStream& ts, const char* header, int limit,
                     std::set<IndexPair>& target) {
    std::string name = ts.next("section header");
    if (name != header) {
        if (name == "ML_U" || name == "CL_U" || name == "ML_V" || name == "CL_V")
            throw ParseError("expected section " + std::string(header) + ", found " + name +
                             " (sections must appear once, in order ML_U CL_U ML_V CL_V)");
        throw ParseError("expected section header " + std::string(header) + ", got '" + name + "'");
    }
    int count = ts.next_int("section pair count");
    if (count < 0) throw ParseError("negative pair count in section " + name);
    for (int p = 0; p < count; ++p) {
        int i = ts.next_int("pair index");
        int j = ts.next_int("pair index");
        if (i == j) throw ParseError("self-pair in section " + name);
        if (i < 1 || j < 1 || i > limit || j > limit)
            throw ParseError("index out of range in section " + name);
        target.insert(make_pair_canonical(i, j));
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open file: " + path);
    std::ostringstream out;
    out << f.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write file: " + path);
    f << text;
}

} // namespace

Instance parse_instance(const std::string& text) {
    TokenStream ts(text);
    std::string magic = ts.next("format magic");
    if (magic != "CBICL") throw ParseError("malformed header: expected 'CBICL', got '" + magic + "'");
    int version = ts.next_int("format version");
    if (version != 1) throw ParseError("unsupported CBICL version " + std::to_string(version));

    int n = ts.next_int("n");
    int m = ts.next_int("m");
    int k = ts.next_int("k");
    if (n < 1 || m < 1) throw ParseError("n and m must be positive");
    if (k < 2) throw ParseError("k must be at least 2");

    arma::mat A(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = ts.next_double("weight entry");

    Instance inst;
    inst.A = WeightMatrix(std::move(A));
    inst.k = k;
    read_pair_block(ts, "ML_U", n, inst.con.ml_u);
    read_pair_block(ts, "CL_U", n, inst.con.cl_u);
    read_pair_block(ts, "ML_V", m, inst.con.ml_v);
    read_pair_block(ts, "CL_V", m, inst.con.cl_v);
    if (!ts.at_end()) throw ParseError("trailing tokens after CL_V section");
    return inst;
}

std::string serialize_instance(const Instance& inst) {
    std::ostringstream out;
    out << "CBICL 1\n";
    out << inst.A.n() << " " << inst.A.m() << " " << inst.k << "\n";
    for (int i = 0; i < inst.A.n(); ++i) {
        for (int j = 0; j < inst.A.m(); ++j) {
            if (j) out << " ";
            out << format_double(inst.A.A(i, j));
        }
        out << "\n";
    }
    auto block = [&out](const char* header, const std::set<IndexPair>& pairs) {
        out << header << " " << pairs.size() << "\n";
        for (const auto& [i, j] : pairs) out << i << " " << j << "\n";
    };
    block("ML_U", inst.con.ml_u);
    block("CL_U", inst.con.cl_u);
    block("ML_V", inst.con.ml_v);
    block("CL_V", inst.con.cl_v);
    return out.str();
}

Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

void save_instance(const Instance& inst, const std::string& path) {
    write_file(path, serialize_instance(inst));
}

namespace {

std::vector<int> read_labels(TokenStream& ts, const char* keyword, int count) {
    std::string name = ts.next("label section");
    if (name != keyword)
        throw ParseError(std::string("expected '") + keyword + "', got '" + name + "'");
    std::vector<int> labels(count);
    for (int i = 0; i < count; ++i) labels[i] = ts.next_int("label");
    return labels;
}

} // namespace

SolutionFile parse_solution(const std::string& text) {
    // label counts are not in the header, so read the rows/cols sections greedily
    TokenStream ts(text);
    std::string magic = ts.next("format magic");
    if (magic != "SOLUTION") throw ParseError("malformed header: expected 'SOLUTION'");
    int version = ts.next_int("format version");
    if (version != 1) throw ParseError("unsupported SOLUTION version " + std::to_string(version));
    std::string kw = ts.next("objective keyword");
    if (kw != "objective") throw ParseError("expected 'objective'");
    SolutionFile sol;
    sol.objective = ts.next_double("objective value");
    kw = ts.next("rows keyword");
    if (kw != "rows") throw ParseError("expected 'rows'");
    std::string tok;
    bool seen_cols = false;
    while (true) {
        std::istringstream probe;
        tok = ts.next("label or 'cols'");
        if (tok == "cols") {
            seen_cols = true;
            break;
        }
        try {
            sol.row_labels.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ParseError("expected row label or 'cols', got '" + tok + "'");
        }
    }
    if (!seen_cols) throw ParseError("missing 'cols' section");
    while (!ts.at_end()) {
        tok = ts.next("label");
        try {
            sol.col_labels.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ParseError("expected column label, got '" + tok + "'");
        }
    }
    if (sol.row_labels.empty() || sol.col_labels.empty())
        throw ParseError("solution must contain at least one row and one column label");
    return sol;
}

std::string serialize_solution(const SolutionFile& sol) {
    std::ostringstream out;
    out << "SOLUTION 1\n";
    out << "objective " << format_double(sol.objective) << "\n";
    out << "rows";
    for (int lab : sol.row_labels) out << " " << lab;
    out << "\ncols";
    for (int lab : sol.col_labels) out << " " << lab;
    out << "\n";
    return out.str();
}

SolutionFile load_solution(const std::string& path) { return parse_solution(read_file(path)); }

void save_solution(const SolutionFile& sol, const std::string& path) {
    write_file(path, serialize_solution(sol));
}

TruthFile parse_truth(const std::string& text) {
    TokenStream ts(text);
    std::string magic = ts.next("format magic");
    if (magic != "TRUTH") throw ParseError("malformed header: expected 'TRUTH'");
    int version = ts.next_int("format version");
    if (version != 1) throw ParseError("unsupported TRUTH version " + std::to_string(version));
    TruthFile truth;
    std::string kw = ts.next("rows keyword");
    if (kw != "rows") throw ParseError("expected 'rows'");
    std::string tok;
    while (true) {
        tok = ts.next("label or 'cols'");
        if (tok == "cols") break;
        try {
            truth.row_labels.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ParseError("expected row label or 'cols', got '" + tok + "'");
        }
    }
    while (!ts.at_end()) truth.col_labels.push_back(ts.next_int("label"));
    return truth;
}

std::string serialize_truth(const TruthFile& truth) {
    std::ostringstream out;
    out << "TRUTH 1\nrows";
    for (int lab : truth.row_labels) out << " " << lab;
    out << "\ncols";
    for (int lab : truth.col_labels) out << " " << lab;
    out << "\n";
    return out.str();
}

TruthFile load_truth(const std::string& path) { return parse_truth(read_file(path)); }

void save_truth(const TruthFile& truth, const std::string& path) {
    write_file(path, serialize_truth(truth));
}

} // namespace cbicl
