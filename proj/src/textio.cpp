#include "odeforge/textio.hpp"

#include <fstream>
#include <sstream>

namespace odeforge {

std::map<std::string, std::string> parse_header(const std::string& line, const std::string& keyword) {
    std::istringstream in(line);
    std::string word;
    if (!(in >> word) || word != keyword) throw FormatError("expected '" + keyword + "' header, got: " + line);
    std::map<std::string, std::string> kv;
    while (in >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos) throw FormatError("bad header field: " + word);
        kv[word.substr(0, eq)] = word.substr(eq + 1);
    }
    return kv;
}

mpq_class parse_rational(const std::string& token) {
    mpq_class q;
    if (q.set_str(token, 10) != 0) throw FormatError("bad number: " + token);
    if (q.get_den() == 0) throw FormatError("zero denominator: " + token);
    q.canonicalize();
    return q;
}

static std::string need(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("missing header field " + key);
    return it->second;
}

static u32 parse_prime(const std::string& v) {
    if (v == "exact") return 0;
    return static_cast<u32>(std::stoul(v));
}

static std::string next_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        return line;
    }
    throw FormatError("unexpected end of input");
}

std::string write_series(const SeriesText& s) {
    std::ostringstream out;
    out << "series var=" << s.var << " prime=" << (s.prime ? std::to_string(s.prime) : "exact")
        << " offset=" << s.offset << " count=" << s.coeffs.size() << "\n";
    for (const auto& c : s.coeffs) out << c.get_str() << "\n";
    return out.str();
}

SeriesText read_series(std::istream& in) {
    auto kv = parse_header(next_line(in), "series");
    SeriesText s;
    s.var = need(kv, "var");
    s.prime = parse_prime(need(kv, "prime"));
    s.offset = std::stol(need(kv, "offset"));
    long count = std::stol(need(kv, "count"));
    for (long k = 0; k < count; ++k) {
        std::string tok;
        if (!(in >> tok)) throw FormatError("series truncated: expected " + std::to_string(count) + " coefficients");
        s.coeffs.push_back(parse_rational(tok));
    }
    return s;
}

SeriesText read_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    return read_series(in);
}

SeriesText to_text(const PrimeSeries& s) {
    SeriesText t;
    t.var = s.var;
    t.prime = s.field.p();
    t.offset = s.offset;
    for (auto c : s.coeffs) t.coeffs.push_back(mpq_class(c));
    return t;
}

PrimeSeries to_prime_series(const SeriesText& s) {
    if (!s.prime) throw FormatError("series is exact; a prime is required");
    PrimeField F(s.prime, PrimeField::word_limit);
    std::vector<u32> c;
    for (const auto& q : s.coeffs) c.push_back(F.from_mpq(q));
    return PrimeSeries(F, std::move(c), s.offset, s.var);
}

template <class T, class Fmt>
static std::string write_op_impl(const ThetaOp<T>& op, const std::string& prime, Fmt fmt) {
    std::ostringstream out;
    int M = std::max(op.order(), 0), D = op.degree();
    out << "thetaop prime=" << prime << " order=" << M << " degree=" << D << "\n";
    for (int i = 0; i <= M; ++i) {
        for (int j = 0; j <= D; ++j) out << (j ? " " : "") << fmt(op.coeff(i, j));
        out << "\n";
    }
    return out.str();
}

std::string write_op(const ThetaOpQ& op) {
    return write_op_impl(op, "exact", [](const mpq_class& c) { return c.get_str(); });
}

std::string write_op(const ThetaOpP& op) {
    return write_op_impl(op, std::to_string(op.one.p), [](const Zp& c) { return std::to_string(c.v); });
}

OpText read_op(std::istream& in) {
    auto kv = parse_header(next_line(in), "thetaop");
    OpText t;
    t.prime = parse_prime(need(kv, "prime"));
    int M = std::stoi(need(kv, "order")), D = std::stoi(need(kv, "degree"));
    std::vector<Poly<mpq_class>> rows(M + 1);
    for (int i = 0; i <= M; ++i)
        for (int j = 0; j <= D; ++j) {
            std::string tok;
            if (!(in >> tok)) throw FormatError("operator truncated");
            rows[i].push_back(parse_rational(tok));
        }
    t.op = ThetaOpQ(std::move(rows), mpq_class(1));
    return t;
}

OpText read_op_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    return read_op(in);
}

ThetaOpP to_prime_op(const OpText& t, u32 p) {
    if (t.prime && t.prime != p) throw FieldMismatch("operator is modulo " + std::to_string(t.prime));
    return reduce(t.op, p);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace odeforge
