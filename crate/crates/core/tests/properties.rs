use proptest::prelude::*;

use ridgesqueeze_core::metrics::framesum_max_dev;
use ridgesqueeze_core::ridge::{filter_grid, local_maxima};
use ridgesqueeze_core::squeeze::{modular_reassign, reconstruct};
use ridgesqueeze_core::tfr::{istft, stft};
use ridgesqueeze_core::window::gaussian_window;
use ridgesqueeze_core::{Axis, Complex64, DirectDft, Signal, TfrGrid};

fn grid_strategy() -> impl Strategy<Value = TfrGrid> {
    (1usize..6, 2usize..24).prop_flat_map(|(frames, bins)| {
        prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), frames * bins).prop_map(
            move |cells| {
                let data = cells.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
                TfrGrid::new(
                    data,
                    Axis::new(0.0, 1.0 / bins as f64, frames),
                    Axis::new(0.0, 1.0, bins),
                    1.0 / bins as f64,
                    "stft",
                    bins as f64,
                )
                .unwrap()
            },
        )
    })
}

fn signal_strategy() -> impl Strategy<Value = Signal> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8..48).prop_map(|s| {
        Signal::new(s.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(), 32.0).unwrap()
    })
}

proptest! {
    #[test]
    fn squeezing_keeps_frame_sums(g in grid_strategy()) {
        let t = modular_reassign(&g, &local_maxima(&g)).unwrap();
        prop_assert!(framesum_max_dev(&g, &t).unwrap() <= 1e-12);
        prop_assert!(t.nonzero_count() <= g.nonzero_count());
    }

    #[test]
    fn squeezing_is_idempotent(g in grid_strategy()) {
        let est = local_maxima(&g);
        let once = modular_reassign(&g, &est).unwrap();
        let twice = modular_reassign(&once, &est).unwrap();
        prop_assert_eq!(once.data(), twice.data());
    }

    #[test]
    fn basins_partition_each_frame(g in grid_strategy()) {
        let est = local_maxima(&g);
        for fr in &est.frames {
            if fr.is_empty() {
                continue;
            }
            let edges = fr.edges();
            prop_assert_eq!(edges[0], 0);
            prop_assert_eq!(*edges.last().unwrap(), g.n_bins());
            prop_assert!(edges.windows(2).all(|e| e[0] < e[1]));
            for (b, &r) in fr.ridges().iter().enumerate() {
                prop_assert!(edges[b] <= r && r < edges[b + 1]);
                prop_assert_eq!(fr.basin_of(r), b);
            }
        }
    }

    #[test]
    fn filtering_is_monotone_in_gamma(g in grid_strategy(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let keep_lo = filter_grid(&g, lo).unwrap();
        let keep_hi = filter_grid(&g, hi).unwrap();
        prop_assert!(keep_hi.nonzero_count() <= keep_lo.nonzero_count());
        for (x, y) in keep_hi.data().iter().zip(keep_lo.data()) {
            prop_assert!(x.norm() == 0.0 || x == y);
        }
    }

    #[test]
    fn transform_round_trips(sig in signal_strategy()) {
        let w = gaussian_window(0.1, 32.0, 3.0).unwrap();
        let v = stft(&sig, &w, &DirectDft::new(32)).unwrap();
        for back in [istft(&v).unwrap(), reconstruct(&modular_reassign(&v, &local_maxima(&v)).unwrap()).unwrap()] {
            for (x, y) in sig.samples().iter().zip(back.samples()) {
                prop_assert!((x - y).norm() <= 1e-10);
            }
        }
    }
}
