//! Taylor jets as automatic differentiation, and d∘d = 0 on a random 1-form.

use bismut::exterior::DifferentialForm;
use bismut::jet::Jet;

fn main() {
    // f(x, y) = sin(x) e^{xy} at (0.3, −0.7), to third order
    let x = Jet::seeds(&[0.3, -0.7], 3);
    let f = &x[0].sin() * &(&x[0] * &x[1]).exp();
    println!("f        = {:.12}", f.value());
    println!("∇f       = {:?}", f.gradient().unwrap());
    println!("∂²f/∂x∂y = {:.12}", f.partial(&[0, 1]).unwrap());

    let a = DifferentialForm::from_expr(3, 1, |x| {
        vec![&x[1] * &x[2].sin(), (&x[0] * &x[2]).exp(), &x[0].square() * &x[1]]
    });
    let dda = a.exterior_derivative().unwrap().exterior_derivative().unwrap();
    let v = dda.eval(&[0.2, 0.5, -0.4]).unwrap();
    println!("max |dda| = {:e}", v.max_abs());
}
