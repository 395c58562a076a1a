use crate::{Error, Result, Scalar};

/// Line `y = slope * (x - anchor) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<F> {
    pub slope: F,
    pub intercept: F,
    pub anchor: u64,
}

impl<F: Scalar> Segment<F> {
    #[inline]
    fn eval(&self, key: u64) -> F {
        self.slope * F::key_offset(key, self.anchor) + self.intercept
    }
}

/// Two-layer recursive model index approximating the eCDF.
///
/// Layer one is the line through (min, 0) and (max, 1); it routes a key to
/// one of `m2` second-layer segments. Each segment interpolates between the
/// first and last sample (key, rank / S) routed to it.
#[derive(Debug, Clone, PartialEq)]
pub struct RmiModel<F> {
    root: Segment<F>,
    segments: Vec<Segment<F>>,
}

impl<F: Scalar> RmiModel<F> {
    pub fn train(sorted_sample: &[u64], m2: usize) -> Result<Self> {
        let s = sorted_sample;
        if s.len() < 2 {
            return Err(Error::SampleTooSmall {
                needed: 2,
                got: s.len(),
            });
        }
        if m2 == 0 {
            return Err(Error::InvalidModel("RMI needs at least one segment".into()));
        }
        let (min, max) = (s[0], s[s.len() - 1]);
        if min == max {
            return Err(Error::DegenerateSample);
        }
        let root = Segment {
            slope: F::one() / F::from_key(max - min),
            intercept: F::zero(),
            anchor: min,
        };
        let size = F::from_count(s.len());
        let mut first: Vec<Option<usize>> = vec![None; m2];
        let mut last = vec![0usize; m2];
        for (i, &k) in s.iter().enumerate() {
            let seg = route(&root, m2, k);
            first[seg].get_or_insert(i);
            last[seg] = i;
        }
        let mut segments: Vec<Segment<F>> = Vec::with_capacity(m2);
        for seg in 0..m2 {
            let Some(f) = first[seg] else {
                // Segment 0 always holds the minimum, so a left neighbour exists.
                let prev = segments[seg - 1];
                segments.push(prev);
                continue;
            };
            let l = last[seg];
            let (xf, xl) = (s[f], s[l]);
            let (yf, yl) = (F::from_count(f) / size, F::from_count(l) / size);
            let slope = if xl > xf {
                (yl - yf) / F::from_key(xl - xf)
            } else {
                F::zero()
            };
            segments.push(Segment {
                slope,
                intercept: yf,
                anchor: xf,
            });
        }
        Ok(Self { root, segments })
    }

    pub fn segments(&self) -> usize {
        self.segments.len()
    }

    pub fn segment(&self, i: usize) -> &Segment<F> {
        &self.segments[i]
    }

    pub fn layer1(&self, key: u64) -> F {
        self.root.eval(key)
    }

    /// eCDF estimate in `[0, 1)`. Not monotone in general.
    pub fn eval(&self, key: u64) -> F {
        let seg = route(&self.root, self.segments.len(), key);
        let y = self.segments[seg].eval(key);
        if y.is_nan() {
            return F::zero();
        }
        y.max(F::zero()).min(F::below_one())
    }
}

#[inline]
fn route<F: Scalar>(root: &Segment<F>, m2: usize, key: u64) -> usize {
    (F::from_count(m2) * root.eval(key))
        .saturating_usize()
        .min(m2 - 1)
}

pub fn rmi_train<F: Scalar>(sorted_sample: &[u64], m2: usize) -> Result<RmiModel<F>> {
    RmiModel::train(sorted_sample, m2)
}

pub fn rmi_eval<F: Scalar>(model: &RmiModel<F>, key: u64) -> F {
    model.eval(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_range_single_segment() {
        let s: Vec<u64> = (0..100).collect();
        let m: RmiModel<f64> = rmi_train(&s, 1).unwrap();
        let rank = s.partition_point(|&x| x < 50) as f64 / 100.0;
        assert!((m.eval(50) - rank).abs() <= 0.02);
        assert!((m.eval(50) - 0.5).abs() <= 0.02);
    }

    #[test]
    fn two_keys() {
        let m: RmiModel<f64> = rmi_train(&[0, 100], 4).unwrap();
        assert_eq!(m.eval(0), 0.0);
        assert!(m.eval(100) < 1.0);
        assert!(m.eval(u64::MAX) < 1.0);
    }

    #[test]
    fn degenerate_and_invalid() {
        assert!(matches!(
            rmi_train::<f64>(&[3, 3, 3], 4),
            Err(Error::DegenerateSample)
        ));
        assert!(rmi_train::<f64>(&[3], 4).is_err());
        assert!(rmi_train::<f64>(&[1, 2], 0).is_err());
    }

    #[test]
    fn hand_composed_four_sample_model() {
        // Layer one: (x - 0) / 40. Two segments split at x = 20.
        // Segment 0 holds keys 0, 10 at ranks 0, 1/4; segment 1 holds 20, 40
        // at ranks 2/4, 3/4.
        let m: RmiModel<f64> = rmi_train(&[0, 10, 20, 40], 2).unwrap();
        let by_hand = |x: f64| {
            let f1 = x / 40.0;
            let seg = ((2.0 * f1).floor() as usize).min(1);
            let y = if seg == 0 {
                0.0 + (0.25 - 0.0) / 10.0 * (x - 0.0)
            } else {
                0.5 + (0.75 - 0.5) / 20.0 * (x - 20.0)
            };
            y.clamp(0.0, f64::below_one())
        };
        for x in [0u64, 5, 10, 19, 20, 30, 40, 100] {
            assert!((m.eval(x) - by_hand(x as f64)).abs() < 1e-15, "x = {x}");
        }
        assert_eq!(m.layer1(20), 0.5);
    }

    #[test]
    fn empty_segments_copy_left_neighbour() {
        let m: RmiModel<f64> = rmi_train(&[0, 1, 2, 3, 1000], 8).unwrap();
        for i in 1..7 {
            assert_eq!(m.segment(i), m.segment(0));
        }
        assert_ne!(m.segment(7), m.segment(0));
    }

    #[test]
    fn output_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut s: Vec<u64> = (0..4096).map(|_| rng.gen_range(1 << 20..1 << 40)).collect();
        s.sort_unstable();
        let m: RmiModel<f64> = rmi_train(&s, 64).unwrap();
        let mf: RmiModel<f32> = rmi_train(&s, 64).unwrap();
        assert_eq!(m.eval(s[0]), 0.0);
        for _ in 0..1_000_000 {
            let x = rng.gen();
            let y = m.eval(x);
            assert!((0.0..1.0).contains(&y));
            assert!((0.0..1.0).contains(&mf.eval(x)));
        }
    }

    #[test]
    fn beats_a_single_line_on_normal_data() {
        use crate::datagen::{generate, Dataset, DatasetSpec};
        let spec = DatasetSpec::new(
            Dataset::Normal {
                mean: 0.0,
                std_dev: 1.0,
            },
            10_000,
            3,
        );
        let mut s: Vec<u64> = generate(&spec)
            .unwrap()
            .iter()
            .map(|&v| ((v + 16.0) * (1u64 << 58) as f64) as u64)
            .collect();
        s.sort_unstable();
        let n = s.len() as f64;
        let m: RmiModel<f64> = rmi_train(&s, 64).unwrap();
        let xs: Vec<f64> = s.iter().map(|&x| (x - s[0]) as f64).collect();
        let ys: Vec<f64> = (0..s.len()).map(|i| i as f64 / n).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        let line: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (slope * (x - mx) + my - y).powi(2))
            .sum::<f64>()
            / n;
        let rmi: f64 = s
            .iter()
            .zip(&ys)
            .map(|(&x, y)| (m.eval(x) - y).powi(2))
            .sum::<f64>()
            / n;
        assert!(rmi <= line, "{rmi} > {line}");
    }
}
