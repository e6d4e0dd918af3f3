//! Real Schur decomposition: Householder reduction to Hessenberg form, then
//! the small-bulge double-shift QR iteration with exceptional shifts and
//! conservative deflation, standardizing 2x2 blocks as it goes.

use nalgebra::DMatrix;

const EXCEPTIONAL_EVERY: usize = 10;
const DAT1: f64 = 0.75;
const DAT2: f64 = -0.4375;

/// Computes `A = Z T Zᵀ`. Returns `None` if the iteration does not converge
/// within `30 * max(10, n)` sweeps per eigenvalue block.
pub fn real_schur(a: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if n == 0 {
        return Some((DMatrix::zeros(0, 0), DMatrix::zeros(0, 0)));
    }
    let (mut z, mut h) = nalgebra::linalg::Hessenberg::new(a.clone()).unpack();
    for j in 0..n {
        for i in j + 2..n {
            h[(i, j)] = 0.0;
        }
    }
    if n == 1 {
        return Some((z, h));
    }
    hessenberg_qr(&mut h, &mut z).then_some((z, h))
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 || (b == 0.0 && b.is_sign_positive()) {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Rotates rows or columns: `x' = c x + s y`, `y' = c y - s x`.
#[inline]
fn rot(x: &mut f64, y: &mut f64, c: f64, s: f64) {
    let (a, b) = (*x, *y);
    *x = c * a + s * b;
    *y = c * b - s * a;
}

/// Householder vector for `[alpha, x]`: returns `(beta, tau)` and scales
/// `x` in place so that `(I - tau v vᵀ) [alpha; x] = [beta; 0]` with
/// `v = [1; x]`.
fn householder(alpha: f64, x: &mut [f64]) -> (f64, f64) {
    let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if xnorm == 0.0 {
        return (alpha, 0.0);
    }
    let beta = -sign(alpha.hypot(xnorm), alpha);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for v in x.iter_mut() {
        *v *= scale;
    }
    (beta, tau)
}

/// Standardizes the 2x2 block `[a b; c d]` in place, returning the
/// rotation `(cs, sn)`. Afterwards either `c == 0` (real eigenvalues) or
/// `a == d` and `b c < 0` (complex pair).
fn standardize_2x2(a: &mut f64, b: &mut f64, c: &mut f64, d: &mut f64) -> (f64, f64) {
    let eps = f64::EPSILON;
    let (mut cs, mut sn);
    if *c == 0.0 {
        cs = 1.0;
        sn = 0.0;
    } else if *b == 0.0 {
        cs = 0.0;
        sn = 1.0;
        std::mem::swap(a, d);
        *b = -*c;
        *c = 0.0;
    } else if *a - *d == 0.0 && sign(1.0, *b) != sign(1.0, *c) {
        cs = 1.0;
        sn = 0.0;
    } else {
        let temp = *a - *d;
        let mut p = 0.5 * temp;
        let bcmax = b.abs().max(c.abs());
        let bcmis = b.abs().min(c.abs()) * sign(1.0, *b) * sign(1.0, *c);
        let scale = p.abs().max(bcmax);
        let mut z = (p / scale) * p + (bcmax / scale) * bcmis;
        if z >= 4.0 * eps {
            z = p + sign(scale.sqrt() * z.sqrt(), p);
            *a = *d + z;
            *d -= (bcmax / z) * bcmis;
            let tau = c.hypot(z);
            cs = z / tau;
            sn = *c / tau;
            *b -= *c;
            *c = 0.0;
        } else {
            let sigma = *b + *c;
            let tau = sigma.hypot(temp);
            cs = (0.5 * (1.0 + sigma.abs() / tau)).sqrt();
            sn = -(p / (tau * cs)) * sign(1.0, sigma);
            let aa = *a * cs + *b * sn;
            let bb = -*a * sn + *b * cs;
            let cc = *c * cs + *d * sn;
            let dd = -*c * sn + *d * cs;
            *a = aa * cs + cc * sn;
            *b = bb * cs + dd * sn;
            *c = -aa * sn + cc * cs;
            *d = -bb * sn + dd * cs;
            let temp = 0.5 * (*a + *d);
            *a = temp;
            *d = temp;
            if *c != 0.0 {
                if *b != 0.0 {
                    if sign(1.0, *b) == sign(1.0, *c) {
                        let sab = b.abs().sqrt();
                        let sac = c.abs().sqrt();
                        p = sign(sab * sac, *c);
                        let tau = 1.0 / (*b + *c).abs().sqrt();
                        *a = temp + p;
                        *d = temp - p;
                        *b -= *c;
                        *c = 0.0;
                        let cs1 = sab * tau;
                        let sn1 = sac * tau;
                        let t = cs * cs1 - sn * sn1;
                        sn = cs * sn1 + sn * cs1;
                        cs = t;
                    }
                } else {
                    *b = -*c;
                    *c = 0.0;
                    let t = cs;
                    cs = -sn;
                    sn = t;
                }
            }
        }
    }
    (cs, sn)
}

/// Reduces upper Hessenberg `h` to quasi-triangular form, accumulating the
/// orthogonal transformations into `z`.
fn hessenberg_qr(h: &mut DMatrix<f64>, z: &mut DMatrix<f64>) -> bool {
    let n = h.nrows();
    let safmin = f64::MIN_POSITIVE;
    let ulp = f64::EPSILON;
    let smlnum = safmin * (n as f64 / ulp);
    let itmax = 30 * n.max(10);
    let mut kdefl = 0usize;
    let mut i = n - 1;

    loop {
        let mut l = 0usize;
        let mut converged = false;
        for _its in 0..=itmax {
            // Look for a single small subdiagonal element.
            let mut k = i;
            while k > l {
                let hkk1 = h[(k, k - 1)].abs();
                if hkk1 <= smlnum {
                    break;
                }
                let mut tst = h[(k - 1, k - 1)].abs() + h[(k, k)].abs();
                if tst == 0.0 {
                    if k >= 2 {
                        tst += h[(k - 1, k - 2)].abs();
                    }
                    if k + 1 < n {
                        tst += h[(k + 1, k)].abs();
                    }
                }
                if hkk1 <= ulp * tst {
                    let ab = hkk1.max(h[(k - 1, k)].abs());
                    let ba = hkk1.min(h[(k - 1, k)].abs());
                    let aa = h[(k, k)].abs().max((h[(k - 1, k - 1)] - h[(k, k)]).abs());
                    let bb = h[(k, k)].abs().min((h[(k - 1, k - 1)] - h[(k, k)]).abs());
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                h[(l, l - 1)] = 0.0;
            }
            if l + 1 >= i {
                converged = true;
                break;
            }
            kdefl += 1;

            // Shifts.
            let (h11, h12, h21, h22);
            if kdefl.is_multiple_of(2 * EXCEPTIONAL_EVERY) {
                let s = h[(i, i - 1)].abs() + h[(i - 1, i - 2)].abs();
                h11 = DAT1 * s + h[(i, i)];
                h12 = DAT2 * s;
                h21 = s;
                h22 = h11;
            } else if kdefl.is_multiple_of(EXCEPTIONAL_EVERY) {
                let s = h[(l + 1, l)].abs() + h[(l + 2, l + 1)].abs();
                h11 = DAT1 * s + h[(l, l)];
                h12 = DAT2 * s;
                h21 = s;
                h22 = h11;
            } else {
                h11 = h[(i - 1, i - 1)];
                h21 = h[(i, i - 1)];
                h12 = h[(i - 1, i)];
                h22 = h[(i, i)];
            }
            let s = h11.abs() + h12.abs() + h21.abs() + h22.abs();
            let (rt1r, rt1i, rt2r, rt2i);
            if s == 0.0 {
                rt1r = 0.0;
                rt1i = 0.0;
                rt2r = 0.0;
                rt2i = 0.0;
            } else {
                let (h11, h12, h21, h22) = (h11 / s, h12 / s, h21 / s, h22 / s);
                let tr = (h11 + h22) / 2.0;
                let det = (h11 - tr) * (h22 - tr) - h12 * h21;
                let rtdisc = det.abs().sqrt();
                if det >= 0.0 {
                    rt1r = tr * s;
                    rt2r = rt1r;
                    rt1i = rtdisc * s;
                    rt2i = -rt1i;
                } else {
                    let a = tr + rtdisc;
                    let b = tr - rtdisc;
                    let r = if (a - h22).abs() <= (b - h22).abs() { a * s } else { b * s };
                    rt1r = r;
                    rt2r = r;
                    rt1i = 0.0;
                    rt2i = 0.0;
                }
            }

            // Look for two consecutive small subdiagonal elements.
            let mut v = [0.0f64; 3];
            let mut m = i - 2;
            loop {
                let h21s = h[(m + 1, m)];
                let s = (h[(m, m)] - rt2r).abs() + rt2i.abs() + h21s.abs();
                let h21s = h[(m + 1, m)] / s;
                v[0] = h21s * h[(m, m + 1)] + (h[(m, m)] - rt1r) * ((h[(m, m)] - rt2r) / s) - rt1i * (rt2i / s);
                v[1] = h21s * (h[(m, m)] + h[(m + 1, m + 1)] - rt1r - rt2r);
                v[2] = h21s * h[(m + 2, m + 1)];
                let s = v[0].abs() + v[1].abs() + v[2].abs();
                v[0] /= s;
                v[1] /= s;
                v[2] /= s;
                if m == l {
                    break;
                }
                let h00 = h[(m, m - 1)].abs() * (v[1].abs() + v[2].abs());
                let h01 = v[0].abs() * (h[(m - 1, m - 1)].abs() + h[(m, m)].abs() + h[(m + 1, m + 1)].abs());
                if h00 <= ulp * h01 {
                    break;
                }
                m -= 1;
            }

            // Double-shift QR sweep.
            for k in m..i {
                let nr = 3.min(i - k + 1);
                if k > m {
                    for r in 0..nr {
                        v[r] = h[(k + r, k - 1)];
                    }
                }
                let (beta, t1) = householder(v[0], &mut v[1..nr]);
                v[0] = beta;
                if k > m {
                    h[(k, k - 1)] = v[0];
                    h[(k + 1, k - 1)] = 0.0;
                    if k + 1 < i {
                        h[(k + 2, k - 1)] = 0.0;
                    }
                } else if m > l {
                    h[(k, k - 1)] *= 1.0 - t1;
                }
                let v2 = v[1];
                let t2 = t1 * v2;
                if nr == 3 {
                    let v3 = v[2];
                    let t3 = t1 * v3;
                    for j in k..n {
                        let sum = h[(k, j)] + v2 * h[(k + 1, j)] + v3 * h[(k + 2, j)];
                        h[(k, j)] -= sum * t1;
                        h[(k + 1, j)] -= sum * t2;
                        h[(k + 2, j)] -= sum * t3;
                    }
                    for j in 0..=(k + 3).min(i) {
                        let sum = h[(j, k)] + v2 * h[(j, k + 1)] + v3 * h[(j, k + 2)];
                        h[(j, k)] -= sum * t1;
                        h[(j, k + 1)] -= sum * t2;
                        h[(j, k + 2)] -= sum * t3;
                    }
                    for j in 0..n {
                        let sum = z[(j, k)] + v2 * z[(j, k + 1)] + v3 * z[(j, k + 2)];
                        z[(j, k)] -= sum * t1;
                        z[(j, k + 1)] -= sum * t2;
                        z[(j, k + 2)] -= sum * t3;
                    }
                } else if nr == 2 {
                    for j in k..n {
                        let sum = h[(k, j)] + v2 * h[(k + 1, j)];
                        h[(k, j)] -= sum * t1;
                        h[(k + 1, j)] -= sum * t2;
                    }
                    for j in 0..=i {
                        let sum = h[(j, k)] + v2 * h[(j, k + 1)];
                        h[(j, k)] -= sum * t1;
                        h[(j, k + 1)] -= sum * t2;
                    }
                    for j in 0..n {
                        let sum = z[(j, k)] + v2 * z[(j, k + 1)];
                        z[(j, k)] -= sum * t1;
                        z[(j, k + 1)] -= sum * t2;
                    }
                }
            }
        }
        if !converged {
            return false;
        }

        if l + 1 == i {
            let (mut a, mut b, mut c, mut d) = (h[(i - 1, i - 1)], h[(i - 1, i)], h[(i, i - 1)], h[(i, i)]);
            let (cs, sn) = standardize_2x2(&mut a, &mut b, &mut c, &mut d);
            h[(i - 1, i - 1)] = a;
            h[(i - 1, i)] = b;
            h[(i, i - 1)] = c;
            h[(i, i)] = d;
            for j in i + 1..n {
                let (mut x, mut y) = (h[(i - 1, j)], h[(i, j)]);
                rot(&mut x, &mut y, cs, sn);
                h[(i - 1, j)] = x;
                h[(i, j)] = y;
            }
            for j in 0..i - 1 {
                let (mut x, mut y) = (h[(j, i - 1)], h[(j, i)]);
                rot(&mut x, &mut y, cs, sn);
                h[(j, i - 1)] = x;
                h[(j, i)] = y;
            }
            for j in 0..n {
                let (mut x, mut y) = (z[(j, i - 1)], z[(j, i)]);
                rot(&mut x, &mut y, cs, sn);
                z[(j, i - 1)] = x;
                z[(j, i)] = y;
            }
        }
        kdefl = 0;
        if l == 0 {
            return true;
        }
        i = l - 1;
        if i == 0 {
            return true;
        }
    }
}
