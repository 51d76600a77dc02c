use listmean::filter::{learn_subspace, FilterParams};
use listmean::search::{search, SearchParams};
use listmean::{Dataset32, Tensor32};

#[test]
fn f32_filter_and_search() {
    let d64 = listmean::harness::generate(0.5, 600, 2, &[1.0, 0.0], &Default::default(), 3).unwrap();
    let pts: Vec<f32> = d64.points().iter().map(|&x| x as f32).collect();
    let data = Dataset32::new(2, pts, 0.5, None).unwrap();
    let (v, _) = learn_subspace(&data, &FilterParams { k: 1, s_cap: 2, ..FilterParams::default() }).unwrap();
    assert!(v.is_orthonormal(1e-5));
    let p = SearchParams { alpha: 0.5, r: 1.5, eps: 0.5, eps_prime: Some(0.25), delta: 0.5, ..SearchParams::default() };
    let list = search(&data, &p, &[0.5f32, 0.0], None).unwrap();
    let best = list.means().iter().map(|m| ((m[0] - 1.0).powi(2) + m[1].powi(2)).sqrt()).fold(f32::INFINITY, f32::min);
    assert!(best <= 0.5, "{best}");
    let h = listmean::tensor::hermite_tensor::<f32>(3, &[0.5, -1.0]).unwrap();
    let _: &Tensor32 = &h;
    assert!(h.is_symmetric(1e-6));
}
