//! Minimal 2-D vector algebra.

use crate::scalar::Float;

/// 2-D point or vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Float> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }

    /// Rotate by the rotation that maps the +x axis onto the unit vector `heading`.
    pub fn rotated_by(self, heading: Self) -> Self {
        Self::new(
            heading.x * self.x - heading.y * self.y,
            heading.y * self.x + heading.x * self.y,
        )
    }

    /// Unit vector, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() {
            Some(self.scale(T::one() / n))
        } else {
            None
        }
    }

    /// Left-hand normal (90° counterclockwise).
    pub fn left_normal(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn to_f32_pair(self) -> [f32; 2] {
        [self.x.as_f64() as f32, self.y.as_f64() as f32]
    }
}

impl<T: Float> core::ops::Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Float> core::ops::Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Axis-aligned rectangle, used for scene extents and metric regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Vec2<f64>,
    pub max: Vec2<f64>,
}

impl Rect {
    pub fn new(min: Vec2<f64>, max: Vec2<f64>) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: Vec2<f64>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.max.x > self.min.x && self.max.y > self.min.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_maps_x_axis_to_heading() {
        let offset = Vec2::new(0.1_f64, 0.0);
        let east = offset.rotated_by(Vec2::new(1.0, 0.0));
        assert_eq!(east, offset);
        let north = offset.rotated_by(Vec2::new(0.0, 1.0));
        assert!((north.x - 0.0).abs() < 1e-15);
        assert!((north.y - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rotation_is_isometry() {
        let h = Vec2::new(0.6_f64, 0.8);
        let a = Vec2::new(0.3, -0.2);
        let b = Vec2::new(-1.0, 0.5);
        let d0 = a.distance(b);
        let d1 = a.rotated_by(h).distance(b.rotated_by(h));
        assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn works_in_f32() {
        let v = Vec2::new(3.0_f32, 4.0);
        assert!((v.norm() - 5.0).abs() < 1e-6);
    }
}
