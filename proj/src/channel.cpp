#include "udd/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "udd/errors.hpp"
#include "udd/mappings.hpp"
#include "udd/rng.hpp"

namespace udd {

namespace {

constexpr double kRowSumTol = 1e-9;
constexpr double kRankTol = 1e-10;

}  // namespace

Eigen::MatrixXd hamming_loss(int size) {
    Eigen::MatrixXd lam = Eigen::MatrixXd::Ones(size, size);
    lam.diagonal().setZero();
    return lam;
}

Channel build_channel(const Eigen::MatrixXd& pi, const Eigen::MatrixXd& lambda) {
    if (pi.rows() < 1 || pi.cols() < 1 || lambda.rows() != pi.rows()) {
        throw DimensionMismatch("pi and lambda must share the clean-alphabet size");
    }
    if (pi.rows() > pi.cols()) {
        throw RankDeficient("pi has more rows than columns; cannot have full row rank");
    }
    if (pi.cols() > kMaxAlphabet || lambda.cols() > kMaxAlphabet) {
        throw DimensionMismatch("alphabet sizes are capped at 255");
    }
    for (Eigen::Index x = 0; x < pi.rows(); ++x) {
        double sum = 0.0;
        for (Eigen::Index z = 0; z < pi.cols(); ++z) {
            const double p = pi(x, z);
            if (!(p >= 0.0 && p <= 1.0 + kRowSumTol)) {
                throw NonStochasticRow("pi(" + std::to_string(x) + "," + std::to_string(z) +
                                       ") outside [0,1]");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
            throw NonStochasticRow("row " + std::to_string(x) + " of pi sums to " +
                                   std::to_string(sum));
        }
    }
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double v = lambda.data()[i];
        if (!std::isfinite(v) || v < 0.0) {
            throw Error("lambda entries must be finite and non-negative");
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(pi);
    if (svd.singularValues()(pi.rows() - 1) <= kRankTol) {
        throw RankDeficient("smallest singular value of pi is " +
                            std::to_string(svd.singularValues()(pi.rows() - 1)));
    }
    return Channel{pi, lambda, static_cast<int>(pi.rows()), static_cast<int>(pi.cols()),
                   static_cast<int>(lambda.cols())};
}

Channel bsc_channel(double delta) {
    if (!(delta >= 0.0 && delta < 0.5)) {
        throw InvalidProbability("BSC crossover must be in [0, 0.5)");
    }
    Eigen::MatrixXd pi(2, 2);
    pi << 1.0 - delta, delta, delta, 1.0 - delta;
    return build_channel(pi, hamming_loss(2));
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& pi) {
    const Eigen::Index m = pi.rows();
    Eigen::MatrixXd gram = pi * pi.transpose();

    // Gauss-Jordan with partial pivoting on [gram | I].
    Eigen::MatrixXd aug(m, 2 * m);
    aug << gram, Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index col = 0; col < m; ++col) {
        Eigen::Index pivot = col;
        for (Eigen::Index r = col + 1; r < m; ++r) {
            if (std::abs(aug(r, col)) > std::abs(aug(pivot, col))) pivot = r;
        }
        if (std::abs(aug(pivot, col)) <= kRankTol * kRankTol) {
            throw RankDeficient("Gram matrix of pi is singular");
        }
        if (pivot != col) aug.row(pivot).swap(aug.row(col));
        aug.row(col) /= aug(col, col);
        for (Eigen::Index r = 0; r < m; ++r) {
            if (r != col && aug(r, col) != 0.0) {
                aug.row(r) -= aug(r, col) * aug.row(col);
            }
        }
    }
    return pi.transpose() * aug.rightCols(m);
}

Eigen::MatrixXd rho(const Channel& ch, const MappingSet& s_set) {
    const int s_count = s_set.size();
    Eigen::MatrixXd out(ch.x_size, s_count);
    for (int x = 0; x < ch.x_size; ++x) {
        for (int s = 0; s < s_count; ++s) {
            double acc = 0.0;
            for (int z = 0; z < ch.z_size; ++z) {
                acc += ch.pi(x, z) * ch.lambda(x, s_set.apply(s, static_cast<Symbol>(z)));
            }
            out(x, s) = acc;
        }
    }
    return out;
}

LossTables estimated_loss(const Channel& ch, const MappingSet& s_set) {
    LossTables t;
    t.l = pseudo_inverse(ch.pi) * rho(ch, s_set);
    t.l_max = t.l.maxCoeff();
    t.l_new = (-t.l).array() + t.l_max;
    return t;
}

SymbolSeq corrupt(const SymbolSeq& x_seq, const Channel& ch, std::uint64_t seed) {
    Rng rng(seed);
    SymbolSeq z_seq(x_seq.size());
    std::vector<double> row(ch.z_size);
    for (std::size_t i = 0; i < x_seq.size(); ++i) {
        const int x = x_seq[i];
        if (x >= ch.x_size) {
            throw SymbolOutOfAlphabet("symbol " + std::to_string(x) + " at position " +
                                      std::to_string(i));
        }
        for (int z = 0; z < ch.z_size; ++z) row[z] = ch.pi(x, z);
        z_seq[i] = static_cast<Symbol>(rng.next_categorical(row));
    }
    return z_seq;
}

Channel load_channel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open channel file: " + path);

    int x_size = -1, z_size = -1, xhat_size = -1;
    struct Entry {
        int i, j;
        double v;
    };
    std::vector<Entry> pi_entries, lambda_entries;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        auto fail = [&] {
            throw Error("bad channel file line " + std::to_string(lineno) + ": " + line);
        };
        if (key == "x_size") {
            if (!(ls >> x_size)) fail();
        } else if (key == "z_size") {
            if (!(ls >> z_size)) fail();
        } else if (key == "xhat_size") {
            if (!(ls >> xhat_size)) fail();
        } else if (key == "pi" || key == "lambda") {
            Entry e;
            if (!(ls >> e.i >> e.j >> e.v)) fail();
            (key == "pi" ? pi_entries : lambda_entries).push_back(e);
        } else {
            fail();
        }
    }
    if (x_size <= 0 || z_size <= 0 || xhat_size <= 0) {
        throw Error("channel file missing alphabet-size headers: " + path);
    }
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(x_size, z_size);
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(x_size, xhat_size);
    for (const auto& e : pi_entries) {
        if (e.i < 0 || e.i >= x_size || e.j < 0 || e.j >= z_size) {
            throw Error("pi index out of range in " + path);
        }
        pi(e.i, e.j) = e.v;
    }
    for (const auto& e : lambda_entries) {
        if (e.i < 0 || e.i >= x_size || e.j < 0 || e.j >= xhat_size) {
            throw Error("lambda index out of range in " + path);
        }
        lambda(e.i, e.j) = e.v;
    }
    return build_channel(pi, lambda);
}

void save_channel_file(const Channel& ch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write channel file: " + path);
    out << "x_size " << ch.x_size << "\n";
    out << "z_size " << ch.z_size << "\n";
    out << "xhat_size " << ch.xhat_size << "\n";
    char buf[64];
    for (int i = 0; i < ch.x_size; ++i) {
        for (int j = 0; j < ch.z_size; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", ch.pi(i, j));
            out << "pi " << i << ' ' << j << ' ' << buf << "\n";
        }
    }
    for (int i = 0; i < ch.x_size; ++i) {
        for (int j = 0; j < ch.xhat_size; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", ch.lambda(i, j));
            out << "lambda " << i << ' ' << j << ' ' << buf << "\n";
        }
    }
}

}  // namespace udd
