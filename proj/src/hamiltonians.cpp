#include "v2rdo/hamiltonians.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace v2rdo {

namespace {

std::uint64_t slot_bit(int type, int site) {
    // 1-based site, type 0 = p, 1 = m.
    return std::uint64_t{1} << (2 * (site - 1) + type);
}

}  // namespace

OperatorPoly ring_hamiltonian(const RingParams& params) {
    const int r = params.sites;
    if (r < 4) throw std::invalid_argument("ring_hamiltonian: needs at least 4 sites");
    if (r > 32) throw std::invalid_argument("ring_hamiltonian: more than 32 sites unsupported");
    const int rank = 2 * r;
    const auto wrap = [r](int i) { return (i - 1) % r + 1; };
    // Wrapped terms like p_r m_1 leave canonical slot order, so every term
    // goes through the algebra product, which tracks the reordering sign.
    const cplx one{1.0, 0.0};

    OperatorPoly h;
    h.rank = rank;
    h.add_term(0, cplx{params.mu * r / 2.0, 0.0});
    for (int i = 1; i <= r; ++i) {
        const int j = wrap(i + 1);
        const OperatorPoly onsite = p_op(i, rank) * m_op(i, rank);
        const OperatorPoly hop = p_op(i, rank) * m_op(j, rank);
        const OperatorPoly hop_rev = p_op(j, rank) * m_op(i, rank);
        h = h + linear_combine({{cplx{params.mu / 2.0, 0.0}, &onsite},
                                {cplx{(params.tau + params.delta) / 2.0, 0.0}, &hop},
                                {cplx{(params.tau - params.delta) / 2.0, 0.0}, &hop_rev}});
    }
    if (params.kappa != 0.0) {
        OperatorPoly quartic;
        quartic.rank = rank;
        for (int i = 1; i <= r; ++i) {
            const int i1 = wrap(i + 1), i2 = wrap(i + 2), i3 = wrap(i + 3);
            const OperatorPoly pp_mm = p_op(i, rank) * p_op(i1, rank) * m_op(i2, rank) * m_op(i3, rank);
            const OperatorPoly pm_pm = p_op(i, rank) * m_op(i1, rank) * p_op(i2, rank) * m_op(i3, rank);
            quartic = quartic + linear_combine({{one, &pp_mm}, {one, &pm_pm}});
        }
        h = h + cplx{params.kappa, 0.0} * quartic;
    }
    return h;
}

OperatorPoly number_operator(int orbitals) {
    if (orbitals < 1 || orbitals > 32) {
        throw std::invalid_argument("number_operator: orbital count outside 1..32");
    }
    OperatorPoly n;
    n.rank = 2 * orbitals;
    n.add_term(0, cplx{orbitals / 2.0, 0.0});
    for (int i = 1; i <= orbitals; ++i) {
        n.add_term(slot_bit(0, i) | slot_bit(1, i), cplx{0.5, 0.0});
    }
    return n;
}

namespace {

std::array<int, 2> canon2(int p, int q) { return {std::max(p, q), std::min(p, q)}; }

std::array<int, 4> canon4(int p, int q, int r, int s) {
    // 8-fold symmetry: (pq|rs) = (qp|rs) = (pq|sr) = (rs|pq) and conjugates.
    if (p < q) std::swap(p, q);
    if (r < s) std::swap(r, s);
    if (p < r || (p == r && q < s)) {
        std::swap(p, r);
        std::swap(q, s);
    }
    return {p, q, r, s};
}

}  // namespace

double MolecularSystem::h1(int p, int q) const {
    const auto it = one_body.find(canon2(p, q));
    return it == one_body.end() ? 0.0 : it->second;
}

double MolecularSystem::eri(int p, int q, int r, int s) const {
    const auto it = two_body.find(canon4(p, q, r, s));
    return it == two_body.end() ? 0.0 : it->second;
}

void MolecularSystem::set_h1(int p, int q, double value) { one_body[canon2(p, q)] = value; }

void MolecularSystem::set_eri(int p, int q, int r, int s, double value) {
    two_body[canon4(p, q, r, s)] = value;
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw std::runtime_error("fcidump line " + std::to_string(line) + ": " + msg);
}

/// Fortran exponents: 1.0D-4 and 1.0d-4 mean 1.0E-4.
double parse_value(std::string token, int line) {
    for (char& c : token) {
        if (c == 'D' || c == 'd') c = 'E';
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        parse_fail(line, "cannot parse value '" + token + "'");
    }
    if (used != token.size()) parse_fail(line, "trailing characters in value '" + token + "'");
    return v;
}

int parse_index(const std::string& token, int line) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(token, &used);
    } catch (const std::exception&) {
        parse_fail(line, "cannot parse index '" + token + "'");
    }
    if (used != token.size() || v < 0) parse_fail(line, "bad orbital index '" + token + "'");
    return v;
}

void check_consistent(double old_value, double new_value, int line) {
    if (std::abs(old_value - new_value) > 1e-10) {
        parse_fail(line, "duplicate entry disagrees with earlier value by " +
                             std::to_string(std::abs(old_value - new_value)));
    }
}

}  // namespace

MolecularSystem parse_fcidump(std::istream& in) {
    MolecularSystem mol;
    std::string line;
    int lineno = 0;

    // Namelist header: runs from &FCI (or $FCI) to &END or /.
    std::string header;
    bool header_done = false;
    bool saw_begin = false;
    while (!header_done && std::getline(in, line)) {
        ++lineno;
        std::string upper = line;
        std::transform(upper.begin(), upper.end(), upper.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        if (!saw_begin) {
            const auto pos = upper.find("&FCI");
            const auto dpos = upper.find("$FCI");
            const auto start = pos != std::string::npos ? pos : dpos;
            if (start == std::string::npos) {
                parse_fail(lineno, "expected an &FCI namelist header");
            }
            saw_begin = true;
            upper = upper.substr(start + 4);
        }
        const auto endpos = std::min(upper.find("&END"), upper.find("$END"));
        const auto slashpos = upper.find('/');
        const auto stop = std::min(endpos, slashpos);
        if (stop != std::string::npos) {
            header += upper.substr(0, stop);
            header_done = true;
        } else {
            header += upper;
            header += ' ';
        }
    }
    if (!saw_begin) parse_fail(lineno + 1, "empty stream, no &FCI header");
    if (!header_done) parse_fail(lineno, "header never terminated by &END or /");

    // KEY=VALUE pairs; list values (ORBSYM) may span several comma-separated
    // tokens, which are skipped unless the key is one we honor.
    for (char& c : header) {
        if (c == ',' || c == '\t') c = ' ';
    }
    std::istringstream hs(header);
    std::string tok;
    std::string pending_key;
    while (hs >> tok) {
        std::string key, value;
        const auto eq = tok.find('=');
        if (eq != std::string::npos) {
            key = tok.substr(0, eq);
            value = tok.substr(eq + 1);
            if (value.empty() && !(hs >> value)) break;
            pending_key = key;
        } else {
            key = pending_key;  // continuation of a list value
            value = tok;
        }
        try {
            if (key == "NORB") mol.n_orbitals = std::stoi(value);
            else if (key == "NELEC") mol.n_electrons = std::stoi(value);
            else if (key == "MS2") mol.ms2 = std::stoi(value);
        } catch (const std::exception&) {
            parse_fail(lineno, "bad header value for " + key + ": '" + value + "'");
        }
    }
    if (mol.n_orbitals <= 0) parse_fail(lineno, "header does not set a positive NORB");
    if (mol.n_electrons < 0) parse_fail(lineno, "header sets a negative NELEC");

    // Integral records.
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string vtok;
        if (!(ls >> vtok)) continue;  // blank line
        const double value = parse_value(vtok, lineno);
        std::string i_s, j_s, k_s, l_s;
        if (!(ls >> i_s >> j_s >> k_s >> l_s)) parse_fail(lineno, "expected four orbital indices");
        std::string extra;
        if (ls >> extra) parse_fail(lineno, "unexpected trailing token '" + extra + "'");
        const int i = parse_index(i_s, lineno), j = parse_index(j_s, lineno);
        const int k = parse_index(k_s, lineno), l = parse_index(l_s, lineno);
        for (int idx : {i, j, k, l}) {
            if (idx > mol.n_orbitals) parse_fail(lineno, "orbital index exceeds NORB");
        }

        if (i == 0 && j == 0 && k == 0 && l == 0) {
            mol.core_energy = value;
        } else if (j == 0 && k == 0 && l == 0) {
            continue;  // orbital energy record, not used
        } else if (k == 0 && l == 0) {
            if (i == 0) parse_fail(lineno, "one-body record with zero bra index");
            const auto key = canon2(i, j);
            const auto it = mol.one_body.find(key);
            if (it != mol.one_body.end()) check_consistent(it->second, value, lineno);
            mol.one_body[key] = value;
        } else if (i == 0 || j == 0 || k == 0 || l == 0) {
            parse_fail(lineno, "malformed record: mixed zero and nonzero indices");
        } else {
            const auto key = canon4(i, j, k, l);
            const auto it = mol.two_body.find(key);
            if (it != mol.two_body.end()) check_consistent(it->second, value, lineno);
            mol.two_body[key] = value;
        }
    }
    return mol;
}

MolecularSystem parse_fcidump_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open FCIDUMP file: " + path);
    return parse_fcidump(in);
}

void emit_fcidump(std::ostream& out, const MolecularSystem& mol) {
    out << "&FCI NORB=" << mol.n_orbitals << ",NELEC=" << mol.n_electrons
        << ",MS2=" << mol.ms2 << ",\n ORBSYM=";
    for (int i = 0; i < mol.n_orbitals; ++i) out << "1,";
    out << "\n ISYM=1,\n&END\n";
    char buf[64];
    const auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& [key, value] : mol.two_body) {
        out << ' ' << fmt(value) << ' ' << key[0] << ' ' << key[1] << ' ' << key[2] << ' '
            << key[3] << '\n';
    }
    for (const auto& [key, value] : mol.one_body) {
        out << ' ' << fmt(value) << ' ' << key[0] << ' ' << key[1] << " 0 0\n";
    }
    out << ' ' << fmt(mol.core_energy) << " 0 0 0 0\n";
}

OperatorPoly molecular_hamiltonian(const MolecularSystem& mol) {
    const int n = mol.n_orbitals;
    if (n <= 0) throw std::invalid_argument("molecular_hamiltonian: empty system");
    if (n > 16) throw std::invalid_argument("molecular_hamiltonian: more than 16 spatial orbitals unsupported");
    const int rank = 4 * n;  // two spin orbitals per spatial orbital
    const auto mode = [](int spatial, int spin) { return 2 * (spatial - 1) + spin + 1; };

    OperatorPoly h = identity_op(rank);
    h.terms[0] = cplx{mol.core_energy, 0.0};

    for (const auto& [key, value] : mol.one_body) {
        const int p = key[0], q = key[1];
        for (int spin = 0; spin < 2; ++spin) {
            FermionString s;
            s.prefactor = cplx{value, 0.0};
            s.ops = {{mode(p, spin), true}, {mode(q, spin), false}};
            h = h + from_fermion_string(s, rank);
            if (p != q) {
                FermionString t;
                t.prefactor = cplx{value, 0.0};
                t.ops = {{mode(q, spin), true}, {mode(p, spin), false}};
                h = h + from_fermion_string(t, rank);
            }
        }
    }

    for (int p = 1; p <= n; ++p) {
        for (int q = 1; q <= n; ++q) {
            for (int r = 1; r <= n; ++r) {
                for (int s = 1; s <= n; ++s) {
                    const double g = mol.eri(p, q, r, s);
                    if (g == 0.0) continue;
                    for (int u = 0; u < 2; ++u) {
                        for (int v = 0; v < 2; ++v) {
                            FermionString f;
                            f.prefactor = cplx{0.5 * g, 0.0};
                            f.ops = {{mode(p, u), true},
                                     {mode(r, v), true},
                                     {mode(s, v), false},
                                     {mode(q, u), false}};
                            h = h + from_fermion_string(f, rank);
                        }
                    }
                }
            }
        }
    }
    return h;
}

}  // namespace v2rdo
