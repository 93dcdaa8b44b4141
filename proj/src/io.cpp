#include <array>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "stokeslab/io.hpp"

namespace stokeslab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int vtk_cell_type(ElementKind kind) {
    switch (kind) {
        case ElementKind::T3: return 5;
        case ElementKind::TET4: return 10;
        case ElementKind::Q4: return 9;
        case ElementKind::B8: return 12;
    }
    return 0;
}

void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<Vector>& velocity,
               const Vector& pressure, const std::string& title) {
    if (velocity.size() != mesh.num_nodes() || pressure.size() != mesh.num_nodes())
        throw ConfigError("write_vtk: field sizes do not match the mesh");
    const std::size_t d = static_cast<std::size_t>(mesh.dim());
    auto coord3 = [&](const Vector& v, std::size_t k) { return k < d ? v[k] : 0.0; };

    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_nodes() << " double\n";
    for (const Vector& x : mesh.nodes())
        out << format_double(coord3(x, 0)) << ' ' << format_double(coord3(x, 1)) << ' '
            << format_double(coord3(x, 2)) << '\n';

    const std::size_t npe = static_cast<std::size_t>(nodes_per_element(mesh.kind()));
    out << "CELLS " << mesh.num_elements() << ' ' << mesh.num_elements() * (npe + 1) << '\n';
    for (const auto& el : mesh.elements()) {
        out << npe;
        for (std::size_t n : el) out << ' ' << n;
        out << '\n';
    }
    out << "CELL_TYPES " << mesh.num_elements() << '\n';
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) out << vtk_cell_type(mesh.kind()) << '\n';

    out << "POINT_DATA " << mesh.num_nodes() << '\n';
    out << "VECTORS velocity double\n";
    for (const Vector& v : velocity)
        out << format_double(coord3(v, 0)) << ' ' << format_double(coord3(v, 1)) << ' '
            << format_double(coord3(v, 2)) << '\n';
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (double p : pressure) out << format_double(p) << '\n';
}

namespace {

// Whitespace tokenizer that tracks line numbers.
class Tokens {
public:
    explicit Tokens(std::istream& in) : in_(in) {}

    bool next_line(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    std::string word(const std::string& what) {
        while (pending_.empty() || pos_ >= pending_.size()) {
            std::string line;
            if (!next_line(line)) throw ParseError(line_, "unexpected end of file, expected " + what);
            std::istringstream ss(line);
            pending_.clear();
            pos_ = 0;
            std::string t;
            while (ss >> t) pending_.push_back(t);
        }
        return pending_[pos_++];
    }

    double number(const std::string& what) {
        const std::string t = word(what);
        try {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used == t.size()) return v;
        } catch (const std::exception&) {
        }
        throw ParseError(line_, what + ": expected a number, got '" + t + "'");
    }

    std::size_t count(const std::string& what) {
        const double v = number(what);
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
            throw ParseError(line_, what + ": expected a non-negative integer");
        return static_cast<std::size_t>(v);
    }

    void expect(const std::string& keyword) {
        const std::string t = word(keyword);
        if (t != keyword) throw ParseError(line_, "expected '" + keyword + "', got '" + t + "'");
    }

    bool at_end() {
        while (pos_ >= pending_.size()) {
            std::string line;
            if (!next_line(line)) return true;
            std::istringstream ss(line);
            pending_.clear();
            pos_ = 0;
            std::string t;
            while (ss >> t) pending_.push_back(t);
        }
        return false;
    }

    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::vector<std::string> pending_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

}  // namespace

VtkData parse_vtk(std::istream& in) {
    Tokens tok(in);
    VtkData data;
    std::string line;
    if (!tok.next_line(line) || line.rfind("# vtk DataFile Version", 0) != 0)
        throw ParseError(tok.line(), "missing '# vtk DataFile Version' header");
    if (!tok.next_line(data.title)) throw ParseError(tok.line(), "missing title line");
    tok.expect("ASCII");
    tok.expect("DATASET");
    tok.expect("UNSTRUCTURED_GRID");

    tok.expect("POINTS");
    const std::size_t np = tok.count("point count");
    (void)tok.word("point data type");
    data.points.resize(np);
    for (auto& p : data.points)
        for (double& c : p) c = tok.number("point coordinate");

    tok.expect("CELLS");
    const std::size_t nc = tok.count("cell count");
    const std::size_t total = tok.count("cell list size");
    std::size_t consumed = 0;
    for (std::size_t c = 0; c < nc; ++c) {
        const std::size_t k = tok.count("cell size");
        std::vector<std::size_t> cell(k);
        for (auto& n : cell) {
            n = tok.count("cell node");
            if (n >= np) throw ParseError(tok.line(), "cell node index out of range");
        }
        consumed += k + 1;
        data.cells.push_back(std::move(cell));
    }
    if (consumed != total) throw ParseError(tok.line(), "CELLS size does not match its entries");

    tok.expect("CELL_TYPES");
    if (tok.count("cell type count") != nc) throw ParseError(tok.line(), "CELL_TYPES count mismatch");
    for (std::size_t c = 0; c < nc; ++c) data.cell_types.push_back(static_cast<int>(tok.count("cell type")));

    if (tok.at_end()) return data;
    tok.expect("POINT_DATA");
    if (tok.count("point data count") != np) throw ParseError(tok.line(), "POINT_DATA count mismatch");
    while (!tok.at_end()) {
        const std::string kind = tok.word("data section");
        const std::string name = tok.word("data name");
        (void)tok.word("data type");
        if (kind == "VECTORS") {
            auto& v = data.vectors[name];
            v.resize(np);
            for (auto& p : v)
                for (double& c : p) c = tok.number("vector component");
        } else if (kind == "SCALARS") {
            std::string t = tok.word("LOOKUP_TABLE");
            if (t != "LOOKUP_TABLE") {  // optional component count
                t = tok.word("LOOKUP_TABLE");
            }
            if (t != "LOOKUP_TABLE") throw ParseError(tok.line(), "expected 'LOOKUP_TABLE'");
            (void)tok.word("lookup table name");
            auto& s = data.scalars[name];
            s.resize(np);
            for (double& x : s) x = tok.number("scalar value");
        } else {
            throw ParseError(tok.line(), "unsupported data section '" + kind + "'");
        }
    }
    return data;
}

}  // namespace stokeslab
