//! Slope arithmetic on `H_1(T; Z) = Z^2` for a JSJ torus `T`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A curve class on a torus: a primitive vector together with a positive
/// multiplicity. The total class is `multiplicity * vector`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    vector: (i64, i64),
    multiplicity: u64,
}

impl Slope {
    /// Normalizes an arbitrary nonzero vector: `(2, 6)` becomes `(1, 3)` with
    /// multiplicity 2.
    pub fn new(a: i64, b: i64) -> Result<Self> {
        Self::with_multiplicity(a, b, 1)
    }

    pub fn with_multiplicity(a: i64, b: i64, multiplicity: u64) -> Result<Self> {
        if a == 0 && b == 0 {
            return Err(Error::ZeroSlope);
        }
        if multiplicity == 0 {
            return Err(Error::ZeroMultiplicity);
        }
        let g = a.unsigned_abs().gcd(&b.unsigned_abs());
        let vector = ((a / g as i64), (b / g as i64));
        Ok(Slope {
            vector,
            multiplicity: multiplicity * g,
        })
    }

    pub fn vector(&self) -> (i64, i64) {
        self.vector
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    pub fn total(&self) -> (i128, i128) {
        let m = self.multiplicity as i128;
        (m * self.vector.0 as i128, m * self.vector.1 as i128)
    }

    pub fn is_primitive(&self) -> bool {
        self.multiplicity == 1
    }

    /// Same curve, opposite direction.
    pub fn reversed(&self) -> Slope {
        Slope {
            vector: (-self.vector.0, -self.vector.1),
            multiplicity: self.multiplicity,
        }
    }

    pub fn is_parallel(&self, other: &Slope) -> bool {
        det(self.vector, other.vector) == 0
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.multiplicity == 1 {
            write!(f, "[{}, {}]", self.vector.0, self.vector.1)
        } else {
            write!(
                f,
                "{}x[{}, {}]",
                self.multiplicity, self.vector.0, self.vector.1
            )
        }
    }
}

fn det(u: (i64, i64), v: (i64, i64)) -> i128 {
    u.0 as i128 * v.1 as i128 - u.1 as i128 * v.0 as i128
}

/// Geometric intersection number of the two total classes.
pub fn intersection_number(c: &Slope, l: &Slope) -> BigInt {
    let d = det(c.vector, l.vector).unsigned_abs();
    BigInt::from(c.multiplicity) * BigInt::from(l.multiplicity) * BigInt::from(d)
}

/// A finite index sublattice `L` of `Z^2`, given by a basis matrix whose
/// columns generate `L`. Describes a finite cover `T' -> T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SublatticeCover {
    basis: [[i64; 2]; 2],
}

impl SublatticeCover {
    pub fn new(basis: [[i64; 2]; 2]) -> Result<Self> {
        let cover = SublatticeCover { basis };
        if cover.det() == 0 {
            return Err(Error::DegenerateCover);
        }
        Ok(cover)
    }

    pub fn from_columns(u: (i64, i64), v: (i64, i64)) -> Result<Self> {
        Self::new([[u.0, v.0], [u.1, v.1]])
    }

    pub fn identity() -> Self {
        SublatticeCover {
            basis: [[1, 0], [0, 1]],
        }
    }

    pub fn basis(&self) -> [[i64; 2]; 2] {
        self.basis
    }

    pub fn det(&self) -> i128 {
        let m = self.basis;
        m[0][0] as i128 * m[1][1] as i128 - m[0][1] as i128 * m[1][0] as i128
    }

    /// `[Z^2 : L]`, the degree of the torus cover.
    pub fn index(&self) -> u128 {
        self.det().unsigned_abs()
    }

    pub fn contains(&self, v: (i128, i128)) -> bool {
        let (x, y) = self.adjugate_apply(v);
        let d = self.det();
        x % d == 0 && y % d == 0
    }

    // adj(M) * v; v lies in L iff both entries are divisible by det M.
    fn adjugate_apply(&self, v: (i128, i128)) -> (i128, i128) {
        let m = self.basis.map(|row| row.map(|x| x as i128));
        (
            m[1][1] * v.0 - m[0][1] * v.1,
            -m[1][0] * v.0 + m[0][0] * v.1,
        )
    }
}

/// Least `k >= 1` with `k * vector(c)` in `L`: the degree of an elevation of
/// `c` to the cover.
pub fn slope_cover_degree(c: &Slope, cover: &SublatticeCover) -> u128 {
    let v = c.vector;
    let (x, y) = cover.adjugate_apply((v.0 as i128, v.1 as i128));
    let g = x.unsigned_abs().gcd(&y.unsigned_abs());
    let n = cover.index();
    n / n.gcd(&g)
}

/// `h = [T' : T] / [c' : c]` from raw covering degrees.
pub fn h_from_degrees(torus_degree: u128, curve_degree: u128) -> Result<Rational> {
    let h = Rational::new(BigInt::from(torus_degree), BigInt::from(curve_degree));
    if h.is_integer() {
        Ok(h)
    } else {
        Err(Error::NonIntegralH { value: h })
    }
}

/// The positive integer attached to an end of an edge when `c` elevates to
/// the cover described by `cover`.
pub fn h_value(c: &Slope, cover: &SublatticeCover) -> Result<Rational> {
    h_from_degrees(cover.index(), slope_cover_degree(c, cover))
}

/// A unimodular frame change between two descriptions of the same torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GluingMatrix {
    matrix: [[i64; 2]; 2],
}

impl GluingMatrix {
    pub fn new(matrix: [[i64; 2]; 2]) -> Result<Self> {
        let det = matrix[0][0] as i128 * matrix[1][1] as i128
            - matrix[0][1] as i128 * matrix[1][0] as i128;
        if det.abs() != 1 {
            return Err(Error::BadGluing { det });
        }
        Ok(GluingMatrix { matrix })
    }

    pub fn identity() -> Self {
        GluingMatrix {
            matrix: [[1, 0], [0, 1]],
        }
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.matrix
    }

    pub fn inverse(&self) -> GluingMatrix {
        let [[a, b], [c, d]] = self.matrix;
        let det = a * d - b * c;
        GluingMatrix {
            matrix: [[d * det, -b * det], [-c * det, a * det]],
        }
    }
}

/// Expresses `s` in the frame reached through `g`. Multiplicity is kept; the
/// image of a primitive vector under a unimodular matrix stays primitive.
pub fn change_frame(s: &Slope, g: &GluingMatrix) -> Slope {
    let [[a, b], [c, d]] = g.matrix;
    let (x, y) = s.vector;
    Slope {
        vector: (a * x + b * y, c * x + d * y),
        multiplicity: s.multiplicity,
    }
}

/// Fractional Dehn twist coefficient `k/m` read off `l+ - l- = k e`.
///
/// Reversing `e` negates the result; callers fix the direction of `e`.
pub fn fdtc(l_plus: &Slope, l_minus: &Slope, e: &Slope, m: u64) -> Result<Rational> {
    if !e.is_primitive() {
        return Err(Error::NonPrimitiveReductionCurve);
    }
    if m == 0 {
        return Err(Error::ZeroTwistPower);
    }
    let (p, q) = (l_plus.total(), l_minus.total());
    let diff = (p.0 - q.0, p.1 - q.1);
    let (ex, ey) = (e.vector.0 as i128, e.vector.1 as i128);
    // e is primitive, so at least one coordinate is nonzero
    let k = if ex != 0 { diff.0 / ex } else { diff.1 / ey };
    if (k * ex, k * ey) != diff {
        return Err(Error::NotParallel(diff.0, diff.1));
    }
    Ok(Rational::new(BigInt::from(k), BigInt::from(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(a: i64, b: i64) -> Slope {
        Slope::new(a, b).unwrap()
    }

    fn sm(a: i64, b: i64, m: u64) -> Slope {
        Slope::with_multiplicity(a, b, m).unwrap()
    }

    fn cover(cols: ((i64, i64), (i64, i64))) -> SublatticeCover {
        SublatticeCover::from_columns(cols.0, cols.1).unwrap()
    }

    #[test]
    fn slopes_normalize() {
        let x = s(2, 6);
        assert_eq!(x.vector(), (1, 3));
        assert_eq!(x.multiplicity(), 2);
        assert_eq!(x.total(), (2, 6));
        assert_eq!(s(-4, 0).vector(), (-1, 0));
        assert_eq!(Slope::new(0, 0), Err(Error::ZeroSlope));
        assert_eq!(
            Slope::with_multiplicity(1, 0, 0),
            Err(Error::ZeroMultiplicity)
        );
    }

    // Counts crossings of straight representatives on the unit square: the
    // line through t*(a, b) meets the closed curve of (c, d) at points of the
    // form i/D along its length, one per fundamental-domain translate.
    fn brute_intersections(u: (i64, i64), v: (i64, i64)) -> u64 {
        let d = (u.0 * v.1 - u.1 * v.0).abs();
        if d == 0 {
            return 0;
        }
        // solve t*u - s*v in Z^2 for t, s in [0, 1): enumerate lattice points
        let mut count = 0;
        let range = 4 * (u.0.abs() + u.1.abs() + v.0.abs() + v.1.abs());
        for x in -range..=range {
            for y in -range..=range {
                // t = (x*v.1 - y*v.0)/D, s = (x*u.1 - y*u.0)/D after sign fix
                let tn = (x * v.1 - y * v.0) * (u.0 * v.1 - u.1 * v.0).signum();
                let sn = (x * u.1 - y * u.0) * (u.0 * v.1 - u.1 * v.0).signum();
                if (0..d).contains(&tn) && (0..d).contains(&sn) {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(intersection_number(&s(1, 0), &s(0, 1)), BigInt::from(1));
        assert_eq!(intersection_number(&s(1, 0), &sm(1, 0, 3)), BigInt::from(0));
        let oracle = brute_intersections((1, 1), (2, -2));
        assert_eq!(oracle, 4);
        assert_eq!(
            intersection_number(&s(1, 1), &sm(1, -1, 2)),
            BigInt::from(oracle)
        );
    }

    #[test]
    fn brute_force_agrees_on_small_vectors() {
        for a in -3..=3i64 {
            for b in -3..=3i64 {
                for c in -3..=3i64 {
                    for d in -3..=3i64 {
                        if (a, b) == (0, 0) || (c, d) == (0, 0) {
                            continue;
                        }
                        let expected = brute_intersections((a, b), (c, d));
                        assert_eq!(
                            intersection_number(&s(a, b), &s(c, d)),
                            BigInt::from(expected),
                            "({a},{b}) vs ({c},{d})"
                        );
                    }
                }
            }
        }
    }

    fn enumerate_degree(c: &Slope, l: &SublatticeCover) -> u128 {
        let (a, b) = c.vector();
        (1..)
            .find(|&k| l.contains((k * a as i128, k * b as i128)))
            .unwrap() as u128
    }

    #[test]
    fn cover_degree_examples() {
        let diag = SublatticeCover::new([[2, 0], [0, 3]]).unwrap();
        assert_eq!(enumerate_degree(&s(1, 0), &diag), 2);
        assert_eq!(slope_cover_degree(&s(1, 0), &diag), 2);
        let skew = cover(((1, 1), (0, 5)));
        assert_eq!(enumerate_degree(&s(1, 1), &skew), 1);
        assert_eq!(slope_cover_degree(&s(1, 1), &skew), 1);
        assert_eq!(
            slope_cover_degree(&s(7, -3), &SublatticeCover::identity()),
            1
        );
        assert_eq!(
            SublatticeCover::new([[1, 2], [2, 4]]),
            Err(Error::DegenerateCover)
        );
    }

    #[test]
    fn h_examples() {
        let diag = SublatticeCover::new([[2, 0], [0, 3]]).unwrap();
        assert_eq!(h_value(&s(1, 0), &diag).unwrap(), Rational::from(3));
        assert_eq!(
            h_value(&s(1, 1), &cover(((1, 1), (0, 5)))).unwrap(),
            Rational::from(5)
        );
        assert_eq!(
            h_value(&s(4, 9), &SublatticeCover::identity()).unwrap(),
            Rational::one()
        );
        assert_eq!(
            h_from_degrees(6, 4),
            Err(Error::NonIntegralH {
                value: Rational::new(3, 2)
            })
        );
    }

    #[test]
    fn frame_examples() {
        assert_eq!(change_frame(&s(1, 0), &GluingMatrix::identity()), s(1, 0));
        let swap = GluingMatrix::new([[0, 1], [1, 0]]).unwrap();
        assert_eq!(change_frame(&s(1, 0), &swap), s(0, 1));
        let shear = GluingMatrix::new([[1, 1], [0, 1]]).unwrap();
        assert_eq!(change_frame(&s(1, 2), &shear), s(3, 2));
        assert_eq!(change_frame(&sm(1, 2, 5), &shear).multiplicity(), 5);
        assert_eq!(
            GluingMatrix::new([[2, 0], [0, 1]]),
            Err(Error::BadGluing { det: 2 })
        );
        let g = GluingMatrix::new([[2, 3], [1, 2]]).unwrap();
        assert_eq!(
            change_frame(&change_frame(&s(5, -7), &g), &g.inverse()),
            s(5, -7)
        );
    }

    #[test]
    fn fdtc_examples() {
        // (1,3) - (1,0) = (0,3) = 3 (0,1)
        assert_eq!(
            fdtc(&s(1, 3), &s(1, 0), &s(0, 1), 2).unwrap(),
            Rational::new(3, 2)
        );
        assert!(fdtc(&s(2, 5), &s(2, 5), &s(1, 1), 7).unwrap().is_zero());
        assert_eq!(
            fdtc(&sm(1, 0, 2), &s(1, 0), &s(0, 1), 1),
            Err(Error::NotParallel(1, 0))
        );
        // flipping e negates
        assert_eq!(
            fdtc(&s(1, 3), &s(1, 0), &s(0, -1), 2).unwrap(),
            Rational::new(-3, 2)
        );
        assert_eq!(
            fdtc(&s(1, 3), &s(1, 0), &sm(0, 1, 2), 1),
            Err(Error::NonPrimitiveReductionCurve)
        );
        assert_eq!(
            fdtc(&s(1, 3), &s(1, 0), &s(0, 1), 0),
            Err(Error::ZeroTwistPower)
        );
    }

    fn small() -> impl Strategy<Value = i64> {
        -12i64..=12
    }

    fn slope() -> impl Strategy<Value = Slope> {
        (small(), small(), 1u64..4)
            .prop_filter("nonzero", |(a, b, _)| (*a, *b) != (0, 0))
            .prop_map(|(a, b, m)| sm(a, b, m))
    }

    fn unimodular() -> impl Strategy<Value = GluingMatrix> {
        // products of elementary shears and a swap
        proptest::collection::vec((0u8..3, -3i64..=3), 0..5).prop_map(|ops| {
            let mut m = [[1i64, 0], [0, 1]];
            for (kind, t) in ops {
                let e = match kind {
                    0 => [[1, t], [0, 1]],
                    1 => [[1, 0], [t, 1]],
                    _ => [[0, 1], [1, 0]],
                };
                m = [
                    [
                        e[0][0] * m[0][0] + e[0][1] * m[1][0],
                        e[0][0] * m[0][1] + e[0][1] * m[1][1],
                    ],
                    [
                        e[1][0] * m[0][0] + e[1][1] * m[1][0],
                        e[1][0] * m[0][1] + e[1][1] * m[1][1],
                    ],
                ];
            }
            GluingMatrix::new(m).unwrap()
        })
    }

    fn cover_strategy() -> impl Strategy<Value = SublatticeCover> {
        (small(), small(), small(), small())
            .prop_filter("index between 1 and 60", |(a, b, c, d)| {
                let det = (a * d - b * c).abs();
                (1..=60).contains(&det)
            })
            .prop_map(|(a, b, c, d)| SublatticeCover::new([[a, b], [c, d]]).unwrap())
    }

    proptest! {
        #[test]
        fn intersection_symmetric_and_multiplicative(c in slope(), l in slope()) {
            let i = intersection_number(&c, &l);
            prop_assert_eq!(&i, &intersection_number(&l, &c));
            let base = intersection_number(
                &Slope::new(c.vector().0, c.vector().1).unwrap(),
                &Slope::new(l.vector().0, l.vector().1).unwrap(),
            );
            prop_assert_eq!(&i, &(base * BigInt::from(c.multiplicity() * l.multiplicity())));
            prop_assert_eq!(i == BigInt::from(0), c.is_parallel(&l));
        }

        #[test]
        fn cover_degree_divides_index(c in slope(), l in cover_strategy()) {
            let k = slope_cover_degree(&c, &l);
            prop_assert_eq!(l.index() % k, 0);
            prop_assert_eq!(k, enumerate_degree(&c, &l));
        }

        #[test]
        fn h_invariant_under_basis_change(c in slope(), l in cover_strategy(), u in unimodular()) {
            let [[a, b], [cc, d]] = l.basis();
            let [[p, q], [r, t]] = u.matrix();
            let moved = SublatticeCover::new([
                [a * p + b * r, a * q + b * t],
                [cc * p + d * r, cc * q + d * t],
            ]).unwrap();
            prop_assert_eq!(h_value(&c, &l).unwrap(), h_value(&c, &moved).unwrap());
        }

        #[test]
        fn frame_change_preserves_intersections(c in slope(), l in slope(), g in unimodular()) {
            prop_assert_eq!(
                intersection_number(&change_frame(&c, &g), &change_frame(&l, &g)),
                intersection_number(&c, &l)
            );
        }

        #[test]
        fn fdtc_scales_with_power(a in small(), b in small(), k in -20i64..=20, m in 1u64..10, n in 1u64..10) {
            prop_assume!((a, b) != (0, 0));
            let e = s(0, 1);
            let l_minus = s(a, b);
            let Ok(l_plus) = Slope::new(a, b + k) else { return Ok(()) };
            let once = fdtc(&l_plus, &l_minus, &e, m).unwrap();
            let scaled = fdtc(&l_plus, &l_minus, &e, n * m).unwrap();
            prop_assert_eq!(once, Rational::from(n as i64) * scaled);
        }
    }
}
