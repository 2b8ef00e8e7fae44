// cache.cpp - flat little-endian serialization of EigenSolution snapshots
#include "dicke/cache.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <type_traits>

namespace dicke {

namespace {

constexpr char magic_head[4] = {'D', 'C', 'K', 'E'};
constexpr char magic_tail[4] = {'E', 'K', 'C', 'D'};

template <class T>
void put(std::ostream& os, const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const char* what) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error(std::string("cache: truncated while reading ") + what);
    return v;
}

void put_vec(std::ostream& os, const Eigen::VectorXd& v) {
    put<std::uint64_t>(os, static_cast<std::uint64_t>(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(sizeof(double) * v.size()));
}

Eigen::VectorXd get_vec(std::istream& is, const char* what) {
    const auto n = get<std::uint64_t>(is, what);
    Eigen::VectorXd v(static_cast<long>(n));
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * n));
    if (!is) throw std::runtime_error(std::string("cache: truncated while reading ") + what);
    return v;
}

void put_mat(std::ostream& os, const Eigen::MatrixXd& m) {
    put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd get_mat(std::istream& is, const char* what) {
    const auto r = get<std::uint64_t>(is, what);
    const auto c = get<std::uint64_t>(is, what);
    Eigen::MatrixXd m(static_cast<long>(r), static_cast<long>(c));
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!is) throw std::runtime_error(std::string("cache: truncated while reading ") + what);
    return m;
}

void put_params(std::ostream& os, const ModelParams& p) {
    put(os, p.omega);
    put(os, p.omega0);
    put(os, p.gamma);
    put(os, p.j);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(p.f));
}

ModelParams get_params(std::istream& is) {
    ModelParams p;
    p.omega = get<double>(is, "omega");
    p.omega0 = get<double>(is, "omega0");
    p.gamma = get<double>(is, "gamma");
    p.j = get<double>(is, "j");
    p.f = static_cast<int>(get<std::uint8_t>(is, "f"));
    return p;
}

}  // namespace

void save_solution(const std::string& path, const EigenSolution& sol) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cache: cannot write " + path);
    os.write(magic_head, 4);
    put<std::uint32_t>(os, cache_format_version);
    put_params(os, sol.params);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(sol.basis.kind));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(sol.basis.truncation));
    put(os, sol.delta);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(sol.sectors.size()));
    for (const auto& sec : sol.sectors) {
        put<std::uint32_t>(os, static_cast<std::uint32_t>(sec.label));
        put<std::int64_t>(os, static_cast<std::int64_t>(sec.vec_first));
        put(os, sec.vec_lo);
        put(os, sec.vec_hi);
        put_vec(os, sec.energies);
        put_mat(os, sec.vectors);
        put_vec(os, sec.tail);
        put<std::uint64_t>(os, static_cast<std::uint64_t>(sec.converged.size()));
        os.write(reinterpret_cast<const char*>(sec.converged.data()),
                 static_cast<std::streamsize>(sec.converged.size()));
        if (sol.basis.kind == BasisKind::fock) {
            put<std::uint64_t>(os, static_cast<std::uint64_t>(sec.fock.states.size()));
            for (const auto& st : sec.fock.states) {
                put<std::uint32_t>(os, static_cast<std::uint32_t>(st.n));
                put<std::uint32_t>(os, static_cast<std::uint32_t>(st.mu));
            }
        } else {
            put<std::uint64_t>(os, static_cast<std::uint64_t>(sec.sym.size()));
            for (const auto& st : sec.sym) {
                put<std::int32_t>(os, st.M);
                put<std::int32_t>(os, st.mu_hi);
                put<std::int8_t>(os, static_cast<std::int8_t>(st.sign));
            }
        }
    }
    os.write(magic_tail, 4);
    if (!os) throw std::runtime_error("cache: write failed for " + path);
}

EigenSolution load_solution(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cache: cannot open " + path);
    char head[4];
    is.read(head, 4);
    if (!is || std::memcmp(head, magic_head, 4) != 0)
        throw std::runtime_error("cache: " + path + " is not a spectrum snapshot");
    const auto ver = get<std::uint32_t>(is, "version");
    if (ver != cache_format_version)
        throw std::runtime_error("cache: unsupported snapshot version " + std::to_string(ver));

    EigenSolution sol;
    sol.params = get_params(is);
    sol.basis.kind = static_cast<BasisKind>(get<std::uint8_t>(is, "basis kind"));
    sol.basis.truncation = static_cast<int>(get<std::uint32_t>(is, "truncation"));
    sol.basis.j = sol.params.j;
    sol.delta = get<double>(is, "delta");
    const auto n_sec = get<std::uint32_t>(is, "sector count");
    sol.sectors.resize(n_sec);
    for (auto& sec : sol.sectors) {
        sec.label = static_cast<int>(get<std::uint32_t>(is, "sector label"));
        sec.vec_first = static_cast<int>(get<std::int64_t>(is, "vec_first"));
        sec.vec_lo = get<double>(is, "vec_lo");
        sec.vec_hi = get<double>(is, "vec_hi");
        sec.energies = get_vec(is, "energies");
        sec.vectors = get_mat(is, "vectors");
        sec.tail = get_vec(is, "tails");
        const auto n_conv = get<std::uint64_t>(is, "converged flags");
        sec.converged.resize(n_conv);
        is.read(reinterpret_cast<char*>(sec.converged.data()),
                static_cast<std::streamsize>(n_conv));
        if (!is) throw std::runtime_error("cache: truncated while reading converged flags");
        const auto n_states = get<std::uint64_t>(is, "basis payload");
        if (sol.basis.kind == BasisKind::fock) {
            sec.fock.label = sec.label;
            sec.fock.states.resize(n_states);
            for (auto& st : sec.fock.states) {
                st.n = static_cast<int>(get<std::uint32_t>(is, "fock n"));
                st.mu = static_cast<int>(get<std::uint32_t>(is, "fock mu"));
            }
        } else {
            sec.sym.resize(n_states);
            for (auto& st : sec.sym) {
                st.M = static_cast<int>(get<std::int32_t>(is, "sym M"));
                st.mu_hi = static_cast<int>(get<std::int32_t>(is, "sym mu"));
                st.sign = static_cast<int>(get<std::int8_t>(is, "sym sign"));
            }
        }
        if (sec.vectors.cols() != static_cast<long>(n_conv) || sec.tail.size() != sec.vectors.cols())
            throw std::runtime_error("cache: inconsistent vector bookkeeping in " + path);
    }
    char tail[4];
    is.read(tail, 4);
    if (!is || std::memcmp(tail, magic_tail, 4) != 0)
        throw std::runtime_error("cache: " + path + " is missing its closing mark");
    if (sol.basis.kind == BasisKind::displaced)
        sol.frame = build_displaced_frame(sol.params, sol.basis.truncation);
    return sol;
}

bool cache_matches(const std::string& path, const ModelParams& p, BasisKind kind, double delta) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return false;
    char head[4];
    is.read(head, 4);
    if (!is || std::memcmp(head, magic_head, 4) != 0) return false;
    std::uint32_t ver;
    is.read(reinterpret_cast<char*>(&ver), sizeof ver);
    if (!is || ver != cache_format_version) return false;
    ModelParams q;
    try {
        q = get_params(is);
    } catch (const std::runtime_error&) {
        return false;
    }
    std::uint8_t kind_byte;
    is.read(reinterpret_cast<char*>(&kind_byte), sizeof kind_byte);
    std::uint32_t trunc;
    is.read(reinterpret_cast<char*>(&trunc), sizeof trunc);
    double file_delta;
    is.read(reinterpret_cast<char*>(&file_delta), sizeof file_delta);
    if (!is) return false;
    return q.omega == p.omega && q.omega0 == p.omega0 && q.gamma == p.gamma && q.j == p.j &&
           q.f == p.f && static_cast<BasisKind>(kind_byte) == kind && file_delta == delta;
}

}  // namespace dicke
