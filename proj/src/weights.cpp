#include "bergman/weights.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "bergman/quadrature.hpp"
#include "json.hpp"

namespace bergman {
namespace {

constexpr double kLog2 = 0.6931471805599453;

double require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key))
    throw std::invalid_argument(std::string("weight config: missing \"") +
                                key + "\"");
  return j.at(key).get<double>();
}

RadialForm parse_form(const nlohmann::json& j) {
  std::string f = j.value("form", "one_minus_r");
  if (f == "one_minus_r") return RadialForm::one_minus_r;
  if (f == "one_minus_r2") return RadialForm::one_minus_r2;
  throw std::invalid_argument("weight config: unknown form \"" + f + "\"");
}

}  // namespace

WeightSpec WeightSpec::standard(double a, RadialForm f) {
  WeightSpec s;
  s.family = Family::standard;
  s.a = a;
  s.form = f;
  return s;
}

WeightSpec WeightSpec::log_perturbed(double p, double q) {
  WeightSpec s;
  s.family = Family::log_perturbed;
  s.p = p;
  s.q = q;
  return s;
}

WeightSpec WeightSpec::exponential(double alpha, double beta, double ell) {
  WeightSpec s;
  s.family = Family::exponential;
  s.alpha = alpha;
  s.beta = beta;
  s.ell = ell;
  return s;
}

WeightSpec WeightSpec::product(std::vector<WeightSpec> factors) {
  WeightSpec s;
  s.family = Family::product;
  s.children = std::move(factors);
  return s;
}

WeightSpec WeightSpec::tail_of(WeightSpec base) {
  WeightSpec s;
  s.family = Family::tail_of;
  s.children.push_back(std::move(base));
  return s;
}

WeightSpec WeightSpec::inv_tail_of(WeightSpec base) {
  WeightSpec s;
  s.family = Family::inv_tail_of;
  s.children.push_back(std::move(base));
  return s;
}

WeightSpec WeightSpec::boundary_power(double p, RadialForm f) {
  WeightSpec s;
  s.family = Family::boundary_power;
  s.a = p;
  s.form = f;
  return s;
}

WeightSpec WeightSpec::tabulated(std::vector<std::pair<double, double>> pts) {
  WeightSpec s;
  s.family = Family::tabulated;
  s.table = std::move(pts);
  return s;
}

WeightSpec make_omega_nu(WeightSpec nu) {
  WeightSpec s;
  s.family = Family::omega_nu;
  s.children.push_back(std::move(nu));
  return s;
}

WeightSpec make_nu_omega(WeightSpec omega) {
  WeightSpec s;
  s.family = Family::nu_omega;
  s.children.push_back(std::move(omega));
  return s;
}

struct Weight::Memo {
  std::mutex mu;
  std::unordered_map<std::uint64_t, EvalResult> tail;
};

Weight::Weight(WeightSpec spec)
    : spec_(std::move(spec)), memo_(std::make_shared<Memo>()) {
  if (!(spec_.scale > 0.0))
    throw std::invalid_argument("weight scale must be positive");
  auto need_children = [&](std::size_t n) {
    if (spec_.children.size() != n)
      throw std::invalid_argument("weight family has wrong arity");
  };
  switch (spec_.family) {
    case Family::standard:
      if (!(spec_.a > -1.0))
        throw std::invalid_argument("standard exponent must exceed -1");
      break;
    case Family::log_perturbed:
      break;  // integrability is checked by validate_weight via tail(0)
    case Family::exponential:
      if (!(spec_.alpha > 0.0 && spec_.beta > 0.0 && spec_.ell > 0.0))
        throw std::invalid_argument(
            "exponential weight needs alpha, beta, ell > 0");
      break;
    case Family::product:
      if (spec_.children.empty())
        throw std::invalid_argument("product weight needs factors");
      break;
    case Family::tail_of:
    case Family::inv_tail_of:
    case Family::omega_nu:
    case Family::nu_omega:
      need_children(1);
      break;
    case Family::boundary_power:
      break;
    case Family::tabulated: {
      const auto& t = spec_.table;
      if (t.size() < 2)
        throw std::invalid_argument("tabulated weight needs >= 2 points");
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i].first >= 0.0 && t[i].first < 1.0))
          throw std::invalid_argument("tabulated radius outside [0,1)");
        if (i > 0 && !(t[i].first > t[i - 1].first))
          throw std::invalid_argument("tabulated radii must increase");
        if (!(t[i].second > 0.0))
          throw std::invalid_argument("tabulated density must be positive");
        xs.push_back(t[i].first);
        ys.push_back(std::log(t[i].second));
      }
      table_ = Pchip(xs, ys);
      table_r_last_ = xs.back();
      table_lw_last_ = ys.back();
      break;
    }
  }
  for (const auto& c : spec_.children)
    kids_.push_back(std::make_shared<const Weight>(c));
}

double Weight::log_density_u(double u) const {
  const double lscale = std::log(spec_.scale);
  switch (spec_.family) {
    case Family::standard:
    case Family::boundary_power: {
      if (spec_.form == RadialForm::one_minus_r) return lscale - spec_.a * u;
      // 1 - r^2 = e^{-u} (2 - e^{-u})
      double em = u > 745.0 ? 0.0 : std::exp(-u);
      return lscale + spec_.a * (-u + std::log(2.0 - em));
    }
    case Family::log_perturbed:
      return lscale - spec_.p * u + spec_.q * std::log1p(u);
    case Family::exponential: {
      // log(1 - r^ell); for ell = 1 this is -u identically, and past
      // u = 500 the expansion 1 - r^ell = ell e^{-u} (1 + O(e^{-u})) holds
      // to full precision while expm1 would underflow.
      double l1mrl;
      if (spec_.ell == 1.0) {
        l1mrl = -u;
      } else if (u > 500.0) {
        l1mrl = std::log(spec_.ell) - u;
      } else {
        l1mrl = std::log(-std::expm1(spec_.ell * log_r_u(u)));
      }
      return lscale - spec_.alpha * std::exp(-spec_.beta * l1mrl);
    }
    case Family::product: {
      double s = lscale;
      for (const auto& k : kids_) s += k->log_density_u(u);
      return s;
    }
    case Family::tail_of:
      return lscale + kids_[0]->tail_u(u).lg;
    case Family::inv_tail_of:
      return lscale - kids_[0]->tail_u(u).lg;
    case Family::omega_nu:
      return lscale + kids_[0]->log_density_u(u) + kids_[0]->tail_u(u).lg;
    case Family::nu_omega:
      return lscale + kids_[0]->log_density_u(u) - kLog2 -
             0.5 * kids_[0]->tail_u(u).lg;
    case Family::tabulated: {
      double r = r_from_u(u);
      if (r <= table_r_last_) return lscale + table_(r);
      // Beyond the grid the density closes linearly to zero at r = 1.
      return lscale + table_lw_last_ - u + u_from_r(table_r_last_);
    }
  }
  return kNegInf;
}

double Weight::log_density(double r) const {
  if (!(r >= 0.0 && r < 1.0))
    throw std::domain_error("weight evaluation needs r in [0,1)");
  return log_density_u(u_from_r(r));
}

LogReal Weight::density(double r) const {
  return LogReal::from_log(log_density(r));
}

double Weight::closed_tail_lg(double u) const {
  const double lscale = std::log(spec_.scale);
  switch (spec_.family) {
    case Family::standard:
      if (spec_.form == RadialForm::one_minus_r)
        return lscale - (spec_.a + 1.0) * u - std::log(spec_.a + 1.0);
      return std::numeric_limits<double>::quiet_NaN();
    case Family::boundary_power:
      if (spec_.form == RadialForm::one_minus_r && spec_.a > -1.0)
        return lscale - (spec_.a + 1.0) * u - std::log(spec_.a + 1.0);
      return std::numeric_limits<double>::quiet_NaN();
    case Family::log_perturbed:
      if (spec_.p == -1.0 && spec_.q < -1.0)
        return lscale + (spec_.q + 1.0) * std::log1p(u) -
               std::log(-spec_.q - 1.0);
      return std::numeric_limits<double>::quiet_NaN();
    case Family::omega_nu:
      return lscale + 2.0 * kids_[0]->tail_u(u).lg - kLog2;
    case Family::nu_omega:
      return lscale + 0.5 * kids_[0]->tail_u(u).lg;
    default:
      return std::numeric_limits<double>::quiet_NaN();
  }
}

bool Weight::has_closed_tail() const {
  return !std::isnan(closed_tail_lg(0.0));
}

EvalResult Weight::try_tail_u(double u) const {
  double c = closed_tail_lg(u);
  if (!std::isnan(c)) return {LogReal::from_log(c), 0.0, EvalStatus::ok};
  const auto key = std::bit_cast<std::uint64_t>(u);
  {
    std::lock_guard<std::mutex> lock(memo_->mu);
    auto it = memo_->tail.find(key);
    if (it != memo_->tail.end()) return it->second;
  }
  EvalResult r = tail_quadrature_u(u);
  std::lock_guard<std::mutex> lock(memo_->mu);
  memo_->tail.emplace(key, r);
  return r;
}

EvalResult Weight::try_tail(double r) const {
  if (!(r >= 0.0 && r < 1.0))
    throw std::domain_error("tail evaluation needs r in [0,1)");
  return try_tail_u(u_from_r(r));
}

LogReal Weight::tail_u(double u) const {
  EvalResult r = try_tail_u(u);
  if (!r.ok())
    throw QuadratureError(std::string("tail evaluation failed: ") +
                          to_string(r.status));
  return r.value;
}

LogReal Weight::tail(double r) const {
  EvalResult e = try_tail(r);
  if (!e.ok())
    throw QuadratureError(std::string("tail evaluation failed: ") +
                          to_string(e.status));
  return e.value;
}

EvalResult Weight::tail_quadrature_u(double u) const {
  auto logf = [this](double t) { return log_density_u(t) - t; };
  LogIntegral q = integrate_tail_u(logf, u);
  return {q.value, q.rel_err, q.status};
}

bool Weight::has_closed_moment() const {
  switch (spec_.family) {
    case Family::standard:
      return true;
    case Family::boundary_power:
      return spec_.a > -1.0;
    default:
      return false;
  }
}

EvalResult Weight::try_moment(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("moment exponent must be >= 0");
  if (has_closed_moment()) {
    double a = spec_.a, lg;
    if (spec_.form == RadialForm::one_minus_r) {
      lg = std::lgamma(x + 1.0) + std::lgamma(a + 1.0) -
           std::lgamma(x + a + 2.0);
    } else {
      // \int_0^1 r^x (1-r^2)^a dr = B((x+1)/2, a+1) / 2
      lg = std::lgamma(0.5 * (x + 1.0)) + std::lgamma(a + 1.0) -
           std::lgamma(0.5 * (x + 1.0) + a + 1.0) - kLog2;
    }
    return {LogReal::from_log(lg + std::log(spec_.scale)), 0.0,
            EvalStatus::ok};
  }
  return moment_quadrature(x);
}

LogReal Weight::moment(double x) const {
  EvalResult e = try_moment(x);
  if (!e.ok())
    throw QuadratureError(std::string("moment evaluation failed: ") +
                          to_string(e.status));
  return e.value;
}

EvalResult Weight::moment_quadrature(double x) const {
  auto logf = [this, x](double u) {
    return x * log_r_u(u) + log_density_u(u) - u;
  };
  LogIntegral q = integrate_peaked(logf, 0.0);
  return {q.value, q.rel_err, q.status};
}

EvalResult mixed_tail_u(const Weight& omega, const Weight& nu, double u) {
  auto logf = [&](double t) {
    return omega.log_density_u(t) - nu.tail_u(t).lg - t;
  };
  LogIntegral q = integrate_tail_u(logf, u);
  return {q.value, q.rel_err, q.status};
}

EvalResult mixed_tail(const Weight& omega, const Weight& nu, double r) {
  if (!(r >= 0.0 && r < 1.0))
    throw std::domain_error("mixed tail needs r in [0,1)");
  return mixed_tail_u(omega, nu, u_from_r(r));
}

EvalResult mixed_moment(const Weight& omega, const Weight& nu, double x) {
  if (!(x >= 0.0)) throw std::domain_error("moment exponent must be >= 0");
  auto logf = [&](double u) {
    return x * log_r_u(u) + omega.log_density_u(u) - nu.tail_u(u).lg - u;
  };
  LogIntegral q = integrate_peaked(logf, 0.0);
  return {q.value, q.rel_err, q.status};
}

void validate_weight(const Weight& w) {
  EvalResult t = w.try_tail(0.0);
  if (t.status == EvalStatus::divergent)
    throw std::invalid_argument("weight is not integrable on [0,1)");
  if (!t.ok())
    throw QuadratureError(std::string("weight mass evaluation failed: ") +
                          to_string(t.status));
  if (!t.value.is_finite() || t.value.is_zero())
    throw std::invalid_argument("weight mass must be positive and finite");
}

namespace {

WeightSpec spec_from_json(const nlohmann::json& j);

std::vector<std::pair<double, double>> points_from_json(
    const nlohmann::json& j) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != 2)
      throw std::invalid_argument("tabulated points must be [r, w] pairs");
    pts.emplace_back(row[0].get<double>(), row[1].get<double>());
  }
  return pts;
}

WeightSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family"))
    throw std::invalid_argument("weight config: expected {\"family\": ...}");
  std::string fam = j.at("family").get<std::string>();
  WeightSpec s;
  if (fam == "standard") {
    s = WeightSpec::standard(require(j, "a"), parse_form(j));
  } else if (fam == "log_perturbed") {
    s = WeightSpec::log_perturbed(require(j, "p"), require(j, "q"));
  } else if (fam == "exponential") {
    s = WeightSpec::exponential(require(j, "alpha"), require(j, "beta"),
                                j.value("ell", 1.0));
  } else if (fam == "product") {
    if (!j.contains("factors") || !j.at("factors").is_array())
      throw std::invalid_argument("product weight needs \"factors\" array");
    std::vector<WeightSpec> kids;
    for (const auto& f : j.at("factors")) kids.push_back(spec_from_json(f));
    s = WeightSpec::product(std::move(kids));
  } else if (fam == "tail_of" || fam == "inv_tail_of" || fam == "omega_nu" ||
             fam == "nu_omega") {
    if (!j.contains("base"))
      throw std::invalid_argument("derived weight needs \"base\" object");
    WeightSpec base = spec_from_json(j.at("base"));
    if (fam == "tail_of") s = WeightSpec::tail_of(std::move(base));
    if (fam == "inv_tail_of") s = WeightSpec::inv_tail_of(std::move(base));
    if (fam == "omega_nu") s = make_omega_nu(std::move(base));
    if (fam == "nu_omega") s = make_nu_omega(std::move(base));
  } else if (fam == "boundary_power") {
    s = WeightSpec::boundary_power(require(j, "p"), parse_form(j));
  } else if (fam == "tabulated") {
    if (j.contains("points")) {
      s = WeightSpec::tabulated(points_from_json(j.at("points")));
    } else if (j.contains("csv")) {
      s = tabulated_from_csv(j.at("csv").get<std::string>());
    } else {
      throw std::invalid_argument("tabulated weight needs points or csv");
    }
  } else {
    throw std::invalid_argument("unknown weight family \"" + fam + "\"");
  }
  s.scale = j.value("scale", 1.0);
  return s;
}

nlohmann::json spec_to_json(const WeightSpec& s) {
  nlohmann::json j;
  auto form_name = [](RadialForm f) {
    return f == RadialForm::one_minus_r ? "one_minus_r" : "one_minus_r2";
  };
  switch (s.family) {
    case Family::standard:
      j["family"] = "standard";
      j["a"] = s.a;
      j["form"] = form_name(s.form);
      break;
    case Family::log_perturbed:
      j["family"] = "log_perturbed";
      j["p"] = s.p;
      j["q"] = s.q;
      break;
    case Family::exponential:
      j["family"] = "exponential";
      j["alpha"] = s.alpha;
      j["beta"] = s.beta;
      j["ell"] = s.ell;
      break;
    case Family::product: {
      j["family"] = "product";
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& k : s.children) arr.push_back(spec_to_json(k));
      j["factors"] = std::move(arr);
      break;
    }
    case Family::tail_of:
      j["family"] = "tail_of";
      j["base"] = spec_to_json(s.children.at(0));
      break;
    case Family::inv_tail_of:
      j["family"] = "inv_tail_of";
      j["base"] = spec_to_json(s.children.at(0));
      break;
    case Family::omega_nu:
      j["family"] = "omega_nu";
      j["base"] = spec_to_json(s.children.at(0));
      break;
    case Family::nu_omega:
      j["family"] = "nu_omega";
      j["base"] = spec_to_json(s.children.at(0));
      break;
    case Family::boundary_power:
      j["family"] = "boundary_power";
      j["p"] = s.a;
      j["form"] = form_name(s.form);
      break;
    case Family::tabulated: {
      j["family"] = "tabulated";
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& pt : s.table)
        arr.push_back(nlohmann::json::array({pt.first, pt.second}));
      j["points"] = std::move(arr);
      break;
    }
  }
  if (s.scale != 1.0) j["scale"] = s.scale;
  return j;
}

}  // namespace

WeightSpec parse_weight_json(const std::string& text) {
  return spec_from_json(nlohmann::json::parse(text));
}

WeightSpec parse_weight_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open weight config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_weight_json(ss.str());
}

std::string weight_to_json(const WeightSpec& spec, int indent) {
  return spec_to_json(spec).dump(indent);
}

WeightSpec tabulated_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open weight table " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    for (auto& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream row(line);
    double r, w;
    if (!(row >> r >> w)) {
      if (lineno == 1) continue;  // tolerate a header row
      throw std::invalid_argument("bad row " + std::to_string(lineno) +
                                  " in weight table " + path);
    }
    pts.emplace_back(r, w);
  }
  return WeightSpec::tabulated(std::move(pts));
}

}  // namespace bergman
