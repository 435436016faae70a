#include "splitkit/algorithms.hpp"

namespace splitkit {

Embedding::Kind parse_embedding_kind(const std::string& s) {
    if (s == "spingarn") return Embedding::Kind::Spingarn;
    if (s == "kuhn_tucker") return Embedding::Kind::KuhnTucker;
    if (s == "saddle") return Embedding::Kind::Saddle;
    if (s == "product_dual") return Embedding::Kind::ProductDual;
    throw ParameterError("unknown embedding '" + s + "' (expected spingarn | kuhn_tucker | saddle | product_dual)");
}

namespace {

void check_links(const OperatorSpec& A, const std::vector<OperatorSpec>& Bs, const std::vector<LinOp>& Ls,
                 const char* who) {
    if (Bs.size() != Ls.size() || Bs.empty())
        throw DimensionError(std::string(who) + ": need one L_k per B_k and at least one pair");
    for (std::size_t k = 0; k < Bs.size(); ++k)
        if (Ls[k].cols() != A.dim() || Ls[k].rows() != Bs[k].dim())
            throw DimensionError(std::string(who) + ": L_" + std::to_string(k + 1) + " is " +
                                 shape_str(Ls[k].rows(), Ls[k].cols()) + ", expected " +
                                 shape_str(Bs[k].dim(), A.dim()));
}

}  // namespace

Embedding build_embedding(Embedding::Kind kind, const std::vector<OperatorSpec>& As,
                          const std::vector<OperatorSpec>& Bs, const std::vector<LinOp>& Ls) {
    if (As.empty()) throw DimensionError("build_embedding: no primal operator");
    Embedding E;
    E.kind = kind;
    const Index n = As.front().dim();
    auto first_block = [n](const Vec& z) { return Vec(z.head(n)); };

    switch (kind) {
        case Embedding::Kind::Spingarn: {
            const std::size_t p = As.size();
            for (const auto& a : As)
                if (a.dim() != n) throw DimensionError("build_embedding(spingarn): all A_i must act on the same H");
            E.layout = SpaceLayout(std::vector<Index>(p, n));
            E.terms.push_back(OperatorSpec::product(As));
            if (p > 1) {
                Mat basis = Mat::Zero(p * n, n);
                for (std::size_t i = 0; i < p; ++i) basis.block(i * n, 0, n, n).setIdentity();
                E.terms.push_back(OperatorSpec::normal_cone(Subspace::span(basis)));
            }
            E.recover = first_block;
            E.tag = "spingarn";
            break;
        }
        case Embedding::Kind::KuhnTucker: {
            const OperatorSpec& A = As.front();
            check_links(A, Bs, Ls, "build_embedding(kuhn_tucker)");
            std::vector<Index> dims{n};
            std::vector<OperatorSpec> f{A};
            for (const auto& b : Bs) {
                dims.push_back(b.dim());
                f.push_back(OperatorSpec::inverse(b));
            }
            E.layout = SpaceLayout(dims);
            const Index N = E.layout.total_dim();
            Mat S = Mat::Zero(N, N);
            for (std::size_t k = 0; k < Bs.size(); ++k) {
                const Index o = E.layout.offset(k + 1), r = Bs[k].dim();
                S.block(0, o, n, r) = Ls[k].adjoint_matrix();
                S.block(o, 0, r, n) = -Ls[k].matrix();
            }
            E.terms.push_back(OperatorSpec::product(f));
            E.terms.push_back(OperatorSpec::skew(S));
            E.recover = first_block;
            E.tag = "kuhn_tucker";
            break;
        }
        case Embedding::Kind::Saddle: {
            const OperatorSpec& A = As.front();
            check_links(A, Bs, Ls, "build_embedding(saddle)");
            if (Bs.size() != 1) throw DimensionError("build_embedding(saddle): exactly one B");
            const Index g = Bs[0].dim();
            E.layout = SpaceLayout({n, g, g});
            Mat S = Mat::Zero(n + 2 * g, n + 2 * g);
            S.block(0, n + g, n, g) = Ls[0].adjoint_matrix();
            S.block(n, n + g, g, g) = -Mat::Identity(g, g);
            S.block(n + g, 0, g, n) = -Ls[0].matrix();
            S.block(n + g, n, g, g) = Mat::Identity(g, g);
            E.terms.push_back(OperatorSpec::product({A, Bs[0], OperatorSpec::zero(g)}));
            E.terms.push_back(OperatorSpec::skew(S));
            E.recover = first_block;
            E.tag = "saddle";
            break;
        }
        case Embedding::Kind::ProductDual: {
            const OperatorSpec& A = As.front();
            check_links(A, Bs, Ls, "build_embedding(product_dual)");
            std::vector<Index> dims{n};
            std::vector<OperatorSpec> f{A};
            for (const auto& b : Bs) {
                dims.push_back(b.dim());
                f.push_back(b);
            }
            E.layout = SpaceLayout(dims);
            E.terms.push_back(OperatorSpec::product(f));
            E.terms.push_back(OperatorSpec::normal_cone(Subspace::graph(Ls, n)));
            E.recover = first_block;
            E.tag = "product_dual";
            break;
        }
    }
    return E;
}

double embedding_residual(const Embedding& E, const Vec& z) {
    E.layout.check(z, "embedding point");
    Vec f = Vec::Zero(z.size());
    for (std::size_t j = 1; j < E.terms.size(); ++j) {
        if (!E.terms[j].has_forward())
            throw ParameterError("embedding_residual: term " + std::to_string(j) + " (" + E.terms[j].describe() +
                                 ") is not single-valued");
        f += E.terms[j].forward(z);
    }
    return (z - E.terms.front().resolvent(1.0, z - f)).norm();
}

}  // namespace splitkit
