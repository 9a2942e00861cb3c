use esgop_core::baselines::{egop, save, sir, EgopOptions, SliceSpec};
use esgop_core::esgop::{run_algorithm1, EsgopConfig};
use esgop_core::metrics::subspace_distance;
use esgop_core::model::{generate, presets, Dataset, DesignDistribution, LinkFunction, MultiIndexModel, NoiseSpec};
use esgop_core::numkit::{DenseMatrix, DenseVector, RngStream};

fn direction(d: usize) -> DenseMatrix {
    let v: Vec<f64> = (0..d).map(|i| if i < 2 { 0.6 + 0.2 * i as f64 } else { 0.0 }).collect();
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    DenseMatrix::from_col_major(d, 1, v.iter().map(|x| x / s).collect()).unwrap()
}

fn linear_data(n: usize, seed: u64) -> (MultiIndexModel, Dataset) {
    let model = MultiIndexModel::new(direction(6), LinkFunction::linear(vec![1.0]).unwrap(), NoiseSpec::Gaussian { sigma: 0.1 }).unwrap();
    let design = DesignDistribution::standard_gaussian(6).unwrap();
    let data = generate(&model, &design, n, &mut RngStream::new(seed, 0)).unwrap();
    (model, data)
}

fn even_data(n: usize, seed: u64) -> (MultiIndexModel, Dataset) {
    let model = MultiIndexModel::new(direction(6), LinkFunction::power(2), NoiseSpec::Gaussian { sigma: 0.1 }).unwrap();
    let design = DesignDistribution::standard_gaussian(6).unwrap();
    let data = generate(&model, &design, n, &mut RngStream::new(seed, 0)).unwrap();
    (model, data)
}

#[test]
fn sir_recovers_a_monotone_index() {
    let (model, data) = linear_data(50_000, 1);
    let est = sir(&data, SliceSpec::default(), 1).unwrap();
    assert_eq!(est.m_hat.asymmetry(), 0.0);
    let e = subspace_distance(&est.u_hat, model.u()).unwrap().procrustes;
    assert!(e < 0.2, "{e}");
}

#[test]
fn even_link_failure_triple() {
    let (model, data) = even_data(200_000, 2);
    let s = sir(&data, SliceSpec::default(), 1).unwrap();
    assert!(s.operator_norm() < 0.05, "sir {}", s.operator_norm());
    let v = save(&data, SliceSpec::default(), 1).unwrap();
    assert_eq!(v.m_hat.asymmetry(), 0.0);
    let ev = subspace_distance(&v.u_hat, model.u()).unwrap().procrustes;
    assert!(ev < 0.2, "save {ev}");
    let design = DesignDistribution::standard_gaussian(6).unwrap();
    let cfg = EsgopConfig::new(1.0, 1.0 / 80f64.sqrt(), 15, 1, 3);
    let es = run_algorithm1(&data, &design, &cfg).unwrap();
    let ee = subspace_distance(&es.u_hat, model.u()).unwrap().procrustes;
    assert!(ee < 0.2, "esgop {ee}");
}

#[test]
fn slicing_methods_depend_on_response_order_only() {
    let (_, data) = even_data(20_000, 5);
    let y2: Vec<f64> = data.y().iter().map(|v| 3.0 * v - 7.0).collect();
    let moved = Dataset::new(data.x().clone(), DenseVector::from(y2)).unwrap();
    for f in [sir, save] {
        let a = f(&data, SliceSpec::default(), 1).unwrap();
        let b = f(&moved, SliceSpec::default(), 1).unwrap();
        assert_eq!(a.m_hat, b.m_hat);
    }
    let flipped: Vec<f64> = data.y().iter().map(|v| -2.0 * v).collect();
    let flipped = Dataset::new(data.x().clone(), DenseVector::from(flipped)).unwrap();
    let a = sir(&data, SliceSpec::default(), 2).unwrap();
    let b = sir(&flipped, SliceSpec::default(), 2).unwrap();
    assert!(subspace_distance(&a.u_hat, &b.u_hat).unwrap().procrustes < 1e-6);
}

#[test]
fn independent_response_gives_small_matrices() {
    let design = DesignDistribution::standard_gaussian(4).unwrap();
    let x = design.sample(&mut RngStream::new(1, 0), 100_000);
    let y = DesignDistribution::standard_gaussian(1).unwrap().sample(&mut RngStream::new(2, 0), 100_000);
    let data = Dataset::new(x, DenseVector::from(y.col(0).to_vec())).unwrap();
    assert!(sir(&data, SliceSpec::default(), 1).unwrap().operator_norm() < 0.01);
    assert!(save(&data, SliceSpec::default(), 1).unwrap().operator_norm() < 0.02);
}

#[test]
fn egop_on_a_linear_link() {
    let (model, data) = linear_data(10_000, 4);
    let est = egop(&data, 1, 1.0, EgopOptions::default()).unwrap();
    assert_eq!(est.eval_points, 200);
    assert_eq!(est.m_hat.asymmetry(), 0.0);
    let e = subspace_distance(&est.u_hat, model.u()).unwrap().procrustes;
    assert!(e < 0.1, "{e}");
}

#[test]
fn slicing_preconditions() {
    let (_, data) = linear_data(15, 1);
    assert!(sir(&data, SliceSpec { n_slices: 10 }, 1).is_err());
    assert!(sir(&data, SliceSpec { n_slices: 0 }, 1).is_err());
}

#[test]
fn egop_paper_preset_comparison_row() {
    let model = presets::paper_fig1(NoiseSpec::Gaussian { sigma: 0.1 });
    let design = DesignDistribution::standard_gaussian(10).unwrap();
    let data = generate(&model, &design, 20_000, &mut RngStream::new(9, 0)).unwrap();
    let est = egop(&data, 3, 1.0, EgopOptions::default()).unwrap();
    let e = subspace_distance(&est.u_hat, model.u()).unwrap();
    assert!(e.procrustes.is_finite() && e.sin_theta <= e.procrustes + 1e-12);
}
