#include "oho/diffop.hpp"

#include <cstdio>

namespace oho {

DiffOp build_generator(const ModelParams& p) {
  if (!generator_ok(p)) throw std::invalid_argument("generator needs nu >= 0 and d0, d2 >= 0");
  const cd i(0, 1);
  DiffOp L;
  L += i * DiffOp::mono(0, 0, 1, 1, cd(1));                       // i dx dxd
  L += -i * DiffOp::mono(1, 1, 0, 0, cd(1));                      // -i x xd
  const double c2 = 0.5 * (p.d0 + p.d2 * p.nu * p.nu - 2.0 * p.nu * p.beta);
  L += DiffOp::mono(0, 2, 0, 0, cd(-c2));                         // -c2 xd^2
  L += i * DiffOp::mono(0, 1, 1, 0, cd(p.d2 * p.nu - p.beta));    // i(d2 nu - beta) xd dx
  L += DiffOp::mono(0, 1, 0, 1, cd(-p.nu));                       // -nu xd dxd
  L += DiffOp::mono(0, 0, 2, 0, cd(0.5 * p.d2));                  // d2/2 dx^2
  return L;
}

std::string serialize(const DiffOp& a) {
  std::string out;
  char buf[128];
  for (const auto& [m, c] : a.terms) {
    double re = c.real() == 0.0 ? 0.0 : c.real();  // normalise -0
    double im = c.imag() == 0.0 ? 0.0 : c.imag();
    std::snprintf(buf, sizeof buf, "(%d,%d,%d,%d): %.17g%+.17gi\n", m[0], m[1], m[2], m[3], re, im);
    out += buf;
  }
  return out;
}

}  // namespace oho
