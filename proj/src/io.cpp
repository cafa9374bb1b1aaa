#include "circmix/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace circmix {

namespace {

Real to_real(const std::string& key, const std::string& text)
{
  std::size_t used = 0;
  Real v;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw DomainError("cannot parse number for '" + key + "': '" + text + "'");
  }
  if (used != text.size())
    throw DomainError("cannot parse number for '" + key + "': '" + text + "'");
  return v;
}

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

} // namespace

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

ComponentDensity parse_density(const std::string& text)
{
  // Normalize separators: "kind:a=1,b=2" and "kind a=1 b=2" both become tokens.
  std::string s = trim(text);
  for (char& c : s)
    if (c == ':' || c == ',' || c == '\t')
      c = ' ';
  std::istringstream is(s);
  std::string kind;
  is >> kind;
  kind = lower(kind);
  if (kind.empty())
    throw DomainError("empty density descriptor");

  std::map<std::string, std::string> params;
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw DomainError("density parameter '" + tok + "' is not key=value");
    const std::string key = lower(tok.substr(0, eq));
    if (!params.emplace(key, tok.substr(eq + 1)).second)
      throw DomainError("duplicate density parameter '" + key + "'");
  }
  auto take = [&](const std::string& key, Real fallback, bool required) {
    const auto it = params.find(key);
    if (it == params.end()) {
      if (required)
        throw DomainError("density '" + kind + "' needs '" + key + "'");
      return fallback;
    }
    const Real v = to_real(key, it->second);
    params.erase(it);
    return v;
  };
  auto finish = [&](ComponentDensity d) {
    if (!params.empty())
      throw DomainError("unknown density parameter '" + params.begin()->first + "' for '" + kind + "'");
    return d;
  };

  if (kind == "vonmises" || kind == "vm") {
    const Real kappa = take("kappa", 0, true);
    return finish(ComponentDensity::von_mises(kappa, take("mu", 0, false)));
  }
  if (kind == "wrappedcauchy" || kind == "wc" || kind == "cauchy") {
    Real gamma;
    if (params.count("gamma"))
      gamma = take("gamma", 0, true);
    else
      gamma = take("rho", 0, true);
    return finish(ComponentDensity::wrapped_cauchy(gamma, take("mu", 0, false)));
  }
  if (kind == "wrappednormal" || kind == "wn" || kind == "normal") {
    const Real rho = take("rho", 0, true);
    return finish(ComponentDensity::wrapped_normal(rho, take("mu", 0, false)));
  }
  if (kind == "uniform") {
    return finish(ComponentDensity::uniform());
  }
  if (kind == "tabulated" || kind == "tab") {
    const auto it = params.find("file");
    if (it == params.end())
      throw DomainError("tabulated density needs 'file'");
    const std::string path = it->second;
    params.erase(it);
    const Real mu = take("mu", 0, false);
    ComponentDensity d = load_tabulated(path);
    return finish(d.shifted(mu));
  }
  throw DomainError("unknown density kind '" + kind + "'");
}

ComponentDensity load_tabulated(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DomainError("cannot open tabulated density file '" + path + "'");
  std::vector<std::pair<Real, Real>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    for (char& c : line)
      if (c == ',')
        c = ' ';
    line = trim(line);
    if (line.empty())
      continue;
    std::istringstream is(line);
    Real a, v;
    if (!(is >> a >> v))
      throw DomainError("tabulated density: malformed line '" + line + "'");
    rows.emplace_back(a, v);
  }
  if (rows.size() < 2)
    throw DomainError("tabulated density needs at least 2 rows");
  std::sort(rows.begin(), rows.end());
  const Real h = kTwoPi / static_cast<Real>(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j)
    if (std::abs(rows[j].first - h * static_cast<Real>(j)) > 0.01 * h)
      throw DomainError("tabulated density angles must form the uniform grid 2 pi j / m");
  std::vector<Real> values;
  values.reserve(rows.size());
  for (const auto& r : rows)
    values.push_back(r.second);
  return ComponentDensity::tabulated(std::move(values));
}

MixtureParams parse_theta(const std::string& text, bool degrees)
{
  const auto parts = split(text, ',');
  if (parts.size() != 3)
    throw DomainError("theta must be 'p,alpha,beta'");
  MixtureParams t{to_real("p", trim(parts[0])), to_real("alpha", trim(parts[1])), to_real("beta", trim(parts[2]))};
  if (degrees) {
    t.alpha *= kPi / 180;
    t.beta *= kPi / 180;
  }
  return t;
}

std::vector<Real> read_angles(std::istream& in)
{
  std::vector<Real> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const Real v = to_real("angle on line " + std::to_string(lineno), line);
    if (!std::isfinite(v))
      throw DomainError("non-finite angle on line " + std::to_string(lineno));
    out.push_back(v);
  }
  return out;
}

std::vector<Real> read_angles_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DomainError("cannot open sample file '" + path + "'");
  return read_angles(in);
}

void write_angles(std::ostream& out, const Sample& sample)
{
  char buf[64];
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g\n", sample.angles(i));
    out << buf;
  }
}

KeyValues parse_key_values(std::istream& in)
{
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw DomainError("config line " + std::to_string(lineno) + " has an empty key");
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second)
      throw DomainError("duplicate config key '" + key + "'");
  }
  return kv;
}

KeyValues read_key_values_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw DomainError("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

std::string format_sci(Real v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

void write_fit_record(std::ostream& out, const FitResult& fit)
{
  out << "n=" << fit.n << '\n'
      << "p=" << format_sci(fit.theta_hat.p) << '\n'
      << "alpha=" << format_sci(fit.theta_hat.alpha) << '\n'
      << "beta=" << format_sci(fit.theta_hat.beta) << '\n'
      << "contrast=" << format_sci(fit.contrast_at_min) << '\n'
      << "n_starts=" << fit.n_starts << '\n'
      << "converged_starts=" << fit.converged_starts << '\n'
      << "near_degenerate=" << (fit.near_degenerate ? 1 : 0) << '\n';
  if (fit.inference) {
    const auto& inf = *fit.inference;
    out << "se_p=" << format_sci(inf.std_errors(0)) << '\n'
        << "se_alpha=" << format_sci(inf.std_errors(1)) << '\n'
        << "se_beta=" << format_sci(inf.std_errors(2)) << '\n';
    static const char* names[] = {"p", "alpha", "beta"};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        out << "cov_" << names[i] << '_' << names[j] << '=' << format_sci((*fit.covariance)(i, j)) << '\n';
  } else {
    out << "inference_error=" << fit.inference_error << '\n';
  }
  for (const auto& lm : fit.local_minima)
    out << "start_" << lm.start_index << '=' << format_sci(lm.theta.p) << ',' << format_sci(lm.theta.alpha) << ','
        << format_sci(lm.theta.beta) << ',' << format_sci(lm.contrast) << ',' << (lm.converged ? 1 : 0) << '\n';
}

std::string fit_csv_header()
{
  return "n,p,alpha,beta,contrast,se_p,se_alpha,se_beta,near_degenerate,converged_starts";
}

std::string fit_csv_row(const FitResult& fit)
{
  std::ostringstream os;
  os << fit.n << ',' << format_sci(fit.theta_hat.p) << ',' << format_sci(fit.theta_hat.alpha) << ','
     << format_sci(fit.theta_hat.beta) << ',' << format_sci(fit.contrast_at_min);
  for (int j = 0; j < 3; ++j)
    os << ',' << (fit.inference ? format_sci(fit.inference->std_errors(j)) : std::string("nan"));
  os << ',' << (fit.near_degenerate ? 1 : 0) << ',' << fit.converged_starts;
  return os.str();
}

} // namespace circmix
