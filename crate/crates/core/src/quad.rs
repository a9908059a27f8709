//! Adaptive Gauss-Kronrod quadrature (15-point rule, globally adaptive
//! bisection). Used for the Fourier inversion of characteristic functions,
//! where the integrand is smooth but may oscillate many times over the
//! integration interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Abscissae of the 15-point Kronrod rule on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

/// Weights of the 15-point Kronrod rule.
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Weights of the embedded 7-point Gauss rule (abscissae XGK[1,3,5,7]).
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// One 15-point Kronrod evaluation on [a, b] with the QUADPACK error model.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);

    let fc = f(mid);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut samples = [(0.0_f64, 0.0_f64); 7];

    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        samples[i] = (f1, f2);
        resk += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            resg += WG[i / 2] * (f1 + f2);
        }
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for (i, (f1, f2)) in samples.iter().enumerate() {
        resasc += WGK[i] * ((f1 - reskh).abs() + (f2 - reskh).abs());
    }

    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * 1.0_f64.min((200.0 * error / resasc).powf(1.5));
    }
    let eps50 = 50.0 * f64::EPSILON * resabs;
    if eps50 > error {
        error = eps50;
    }

    Segment { a, b, value, error }
}

/// Globally adaptive integration of `f` over [a, b].
///
/// `initial_segments` seeds the subdivision (useful for oscillatory
/// integrands where a single panel grossly underestimates the error);
/// bisection then refines the worst panel until the total estimated error
/// falls below `max(abs_tol, rel_tol * |value|)` or `max_segments` is hit.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    initial_segments: usize,
    max_segments: usize,
) -> QuadOutcome {
    let m = initial_segments.max(1);
    let mut heap: BinaryHeap<Segment> = BinaryHeap::with_capacity(max_segments.min(4096));
    let width = (b - a) / m as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    for i in 0..m {
        let seg = gk15(f, a + i as f64 * width, a + (i + 1) as f64 * width);
        value += seg.value;
        error += seg.error;
        heap.push(seg);
    }

    while error > abs_tol.max(rel_tol * value.abs()) && heap.len() < max_segments {
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        if worst.b - worst.a < f64::EPSILON * (b - a).abs() {
            // Cannot subdivide further; put it back and stop.
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the heap for a less correlated error estimate.
    let mut total = 0.0;
    let mut err = 0.0;
    for seg in heap.iter() {
        total += seg.value;
        err += seg.error;
    }
    QuadOutcome { value: total, error: err }
}
