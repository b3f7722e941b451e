#pragma once

// Text formats shared by the CLI and the pipeline.
//
//   series var=<name> prime=<p|exact> offset=<n0> count=<N>
//   <one coefficient per line: decimal integer or num/den>
//
//   thetaop prime=<p|exact> order=<M> degree=<D>
//   <(M+1)(D+1) coefficients, row i lists the w^0..w^D coefficients of theta^i>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "odeforge/theta.hpp"

namespace odeforge {

struct SeriesText {
    std::string var = "w";
    u32 prime = 0;  // 0 means exact
    long offset = 0;
    std::vector<mpq_class> coeffs;
};

std::string write_series(const SeriesText& s);
SeriesText read_series(std::istream& in);
SeriesText read_series_file(const std::string& path);

SeriesText to_text(const PrimeSeries& s);
PrimeSeries to_prime_series(const SeriesText& s);

struct OpText {
    u32 prime = 0;
    ThetaOpQ op;  // residues stored as integers when prime != 0
};

std::string write_op(const ThetaOpQ& op);
std::string write_op(const ThetaOpP& op);
OpText read_op(std::istream& in);
OpText read_op_file(const std::string& path);
ThetaOpP to_prime_op(const OpText& t, u32 p);

// "key=value" tokens after the leading keyword
std::map<std::string, std::string> parse_header(const std::string& line, const std::string& keyword);
mpq_class parse_rational(const std::string& token);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace odeforge
