use quantile_bootstrap::index_dist::*;
use quantile_bootstrap::quantile::QuantileQuery;
fn main(){
  for (n,q) in [(100usize,0.01),(100,0.5),(100,0.1),(100,0.25),(500,0.01)] {
    let qq=QuantileQuery::new(q).unwrap();
    let e=exact_index_pmf(n,qq,&ExactPmfConfig{max_n_supported:600,..Default::default()}).unwrap().normalized;
    let b=binomial_index_pmf(n,qq);
    let mut shifted=e.clone(); shifted.support_lo-=1; shifted.support_hi-=1;
    println!("{n} {q}: 1-based {:.5}  0-based {:.5}  e(1)={:.4} e(2)={:.4} b0={:.4} b1={:.4} b2={:.4}", max_abs_pmf_diff(&e,&b), max_abs_pmf_diff(&shifted,&b), e.prob(1),e.prob(2),b.prob(0),b.prob(1),b.prob(2));
  }
}
