#pragma once

#include "circmix/circ.hpp"
#include "circmix/contrast.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace circmix {

//! Parses "vonmises:kappa=5,mu=0", "vonmises kappa=5 mu=0", "wc:gamma=0.8",
//! "wrappednormal:rho=0.8", "uniform" or "tabulated:file=path".
//! Throws DomainError on unknown kinds or keys.
ComponentDensity parse_density(const std::string& text);

//! Two-column text (angle, value) on a uniform grid starting at 0; angles may
//! deviate from the grid by at most 1% of the spacing.
ComponentDensity load_tabulated(const std::string& path);

//! "p,alpha,beta" in radians (or degrees for the angles).
MixtureParams parse_theta(const std::string& text, bool degrees = false);

//! One angle per line; blank lines and '#' comments skipped.
std::vector<Real> read_angles(std::istream& in);
std::vector<Real> read_angles_file(const std::string& path);
//! One angle per line, 12 significant digits.
void write_angles(std::ostream& out, const Sample& sample);

//! Flat "key = value" text; '#' starts a comment. Duplicate keys rejected.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values_file(const std::string& path);

//! Scientific notation with 6 significant digits, '.' separator.
std::string format_sci(Real v);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

//! Flat key=value record of a fit.
void write_fit_record(std::ostream& out, const FitResult& fit);
std::string fit_csv_header();
std::string fit_csv_row(const FitResult& fit);

} // namespace circmix
