//! Dormand-Prince 8(5,3) integrator for complex first-order systems.
//!
//! The state is a flat slice of complex numbers. Each complex component
//! counts once in the RMS error norm. Integration can be split at knots so
//! that discontinuities of the right-hand side only ever fall on step
//! boundaries.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on |h|; 0 means unbounded.
    pub h_max: f64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 200_000,
            h_max: 0.0,
        }
    }
}

impl OdeConfig {
    pub fn with_rtol(rtol: f64) -> Self {
        Self {
            rtol,
            atol: rtol * 1e-2,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

/// Integrator state carried across knots.
pub struct Dop853<F> {
    rhs: F,
    cfg: OdeConfig,
    h: f64,
    facold: f64,
    k: [Vec<Complex64>; 12],
    tmp: Vec<Complex64>,
    pub stats: OdeStats,
}

impl<F> Dop853<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    pub fn new(rhs: F, dim: usize, cfg: OdeConfig) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            rhs,
            cfg,
            h: 0.0,
            facold: 1e-4,
            k: std::array::from_fn(|_| z.clone()),
            tmp: z,
            stats: OdeStats::default(),
        }
    }

    fn initial_step(&mut self, x: f64, y: &[Complex64], span: f64) -> f64 {
        let n = y.len() as f64;
        let (rtol, atol) = (self.cfg.rtol, self.cfg.atol);
        (self.rhs)(x, y, &mut self.k[0]);
        self.stats.evals += 1;
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for (yi, fi) in y.iter().zip(&self.k[0]) {
            let sk = atol + rtol * yi.norm();
            dnf += (fi.norm() / sk).powi(2);
            dny += (yi.norm() / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(span.abs());
        if self.cfg.h_max > 0.0 {
            h = h.min(self.cfg.h_max);
        }
        let sign = span.signum();
        for (t, (yi, fi)) in self.tmp.iter_mut().zip(y.iter().zip(&self.k[0])) {
            *t = yi + fi * (sign * h);
        }
        let tmp = std::mem::take(&mut self.tmp);
        (self.rhs)(x + sign * h, &tmp, &mut self.k[1]);
        self.tmp = tmp;
        self.stats.evals += 1;
        let mut der2 = 0.0;
        for ((yi, f0), f1) in y.iter().zip(&self.k[0]).zip(&self.k[1]) {
            let sk = atol + rtol * yi.norm();
            der2 += ((f1 - f0).norm() / sk).powi(2);
        }
        let der2 = (der2 / n).sqrt() / h;
        let der12 = der2.max((dnf / n).sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(1.0 / 8.0)
        };
        (100.0 * h).min(h1).min(span.abs())
    }

    /// Advances `y` from `x0` to `x1` (either direction).
    pub fn advance(&mut self, x0: f64, x1: f64, y: &mut [Complex64]) -> Result<()> {
        let span = x1 - x0;
        if span == 0.0 {
            return Ok(());
        }
        let dir = span.signum();
        if self.h == 0.0 {
            self.h = self.initial_step(x0, y, span);
        }
        let mut h = self.h.abs().min(span.abs());
        let mut x = x0;
        (self.rhs)(x, y, &mut self.k[0]);
        self.stats.evals += 1;
        let mut last_rejected = false;
        loop {
            if self.stats.accepted + self.stats.rejected >= self.cfg.max_steps {
                return Err(Error::IntegratorFailure {
                    x,
                    reason: "step budget exhausted".into(),
                });
            }
            if h < 1e-14 * x.abs().max(span.abs()).max(1.0) {
                return Err(Error::IntegratorFailure {
                    x,
                    reason: "step size underflow".into(),
                });
            }
            let remaining = (x1 - x) * dir;
            let finishing = h >= remaining * (1.0 - 1e-12);
            if finishing {
                h = remaining;
            }
            let hs = h * dir;
            let err = self.trial_step(x, hs, y);
            self.stats.evals += 11;

            const SAFE: f64 = 0.9;
            const FACC1: f64 = 1.0 / 0.333;
            const FACC2: f64 = 1.0 / 6.0;
            let fac11 = err.powf(1.0 / 8.0);
            let fac = FACC2.max(FACC1.min(fac11 / SAFE));
            let mut h_new = h / fac;
            if err <= 1.0 {
                self.stats.accepted += 1;
                self.facold = err.max(1e-4);
                y.copy_from_slice(&self.tmp);
                x = if finishing { x1 } else { x + hs };
                if last_rejected {
                    h_new = h_new.min(h);
                }
                last_rejected = false;
                if self.cfg.h_max > 0.0 {
                    h_new = h_new.min(self.cfg.h_max);
                }
                if finishing {
                    // keep the proposed size for the next knot interval
                    self.h = h_new.max(h);
                    return Ok(());
                }
                (self.rhs)(x, y, &mut self.k[0]);
                self.stats.evals += 1;
                h = h_new;
            } else {
                self.stats.rejected += 1;
                last_rejected = true;
                h /= FACC1.min(fac11 / SAFE);
            }
        }
    }

    /// One 12-stage step from `(x, y)` with signed step `h`; the candidate
    /// lands in `self.tmp` and the scaled error norm is returned.
    fn trial_step(&mut self, x: f64, h: f64, y: &[Complex64]) -> f64 {
        let dim = y.len();
        let stage = |k: &[Vec<Complex64>; 12], coef: &[(usize, f64)], out: &mut Vec<Complex64>| {
            for i in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(j, a) in coef {
                    acc += k[j][i] * a;
                }
                out[i] = y[i] + acc * h;
            }
        };
        let mut arg = vec![Complex64::new(0.0, 0.0); dim];
        let tableau: [(f64, &[(usize, f64)]); 11] = [
            (C2, &[(0, A21)]),
            (C3, &[(0, A31), (1, A32)]),
            (C4, &[(0, A41), (2, A43)]),
            (C5, &[(0, A51), (2, A53), (3, A54)]),
            (C6, &[(0, A61), (3, A64), (4, A65)]),
            (C7, &[(0, A71), (3, A74), (4, A75), (5, A76)]),
            (C8, &[(0, A81), (3, A84), (4, A85), (5, A86), (6, A87)]),
            (
                C9,
                &[(0, A91), (3, A94), (4, A95), (5, A96), (6, A97), (7, A98)],
            ),
            (
                C10,
                &[
                    (0, A101),
                    (3, A104),
                    (4, A105),
                    (5, A106),
                    (6, A107),
                    (7, A108),
                    (8, A109),
                ],
            ),
            (
                C11,
                &[
                    (0, A111),
                    (3, A114),
                    (4, A115),
                    (5, A116),
                    (6, A117),
                    (7, A118),
                    (8, A119),
                    (9, A1110),
                ],
            ),
            (
                1.0,
                &[
                    (0, A121),
                    (3, A124),
                    (4, A125),
                    (5, A126),
                    (6, A127),
                    (7, A128),
                    (8, A129),
                    (9, A1210),
                    (10, A1211),
                ],
            ),
        ];
        for (s, (c, coef)) in tableau.iter().enumerate() {
            stage(&self.k, coef, &mut arg);
            let mut out = std::mem::take(&mut self.k[s + 1]);
            (self.rhs)(x + c * h, &arg, &mut out);
            self.k[s + 1] = out;
        }
        // k[11] is the stage at x + h
        let (rtol, atol) = (self.cfg.rtol, self.cfg.atol);
        let k = &self.k;
        let mut err = 0.0;
        let mut err2 = 0.0;
        for i in 0..dim {
            let incr = k[0][i] * B1
                + k[5][i] * B6
                + k[6][i] * B7
                + k[7][i] * B8
                + k[8][i] * B9
                + k[9][i] * B10
                + k[10][i] * B11
                + k[11][i] * B12;
            let y_new = y[i] + incr * h;
            self.tmp[i] = y_new;
            let sk = atol + rtol * y[i].norm().max(y_new.norm());
            let e2 = incr - k[0][i] * BHH1 - k[8][i] * BHH2 - k[11][i] * BHH3;
            err2 += (e2.norm() / sk).powi(2);
            let e = k[0][i] * ER1
                + k[5][i] * ER6
                + k[6][i] * ER7
                + k[7][i] * ER8
                + k[8][i] * ER9
                + k[9][i] * ER10
                + k[10][i] * ER11
                + k[11][i] * ER12;
            err += (e.norm() / sk).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        h.abs() * err * (1.0 / (deno * dim as f64)).sqrt()
    }
}

/// Integrates through the increasing or decreasing sequence `knots`,
/// starting from `y0` at `knots[0]`, and returns the state at every knot.
pub fn integrate_knots<F>(
    rhs: F,
    knots: &[f64],
    y0: &[Complex64],
    cfg: OdeConfig,
) -> Result<(Vec<Vec<Complex64>>, OdeStats)>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    if y0.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::IntegratorFailure {
            x: knots.first().copied().unwrap_or(0.0),
            reason: "non-finite initial data".into(),
        });
    }
    let mut solver = Dop853::new(rhs, y0.len(), cfg);
    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(knots.len());
    out.push(y.clone());
    for w in knots.windows(2) {
        solver.advance(w[0], w[1], &mut y)?;
        if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::IntegratorFailure {
                x: w[1],
                reason: "solution overflow".into(),
            });
        }
        out.push(y.clone());
    }
    Ok((out, solver.stats))
}

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;
