#ifndef KLAB_VERSION_HPP
#define KLAB_VERSION_HPP

#define KLAB_VERSION "0.1.0"

#endif  // KLAB_VERSION_HPP
